#pragma once

#include <array>

#include "fusionlab/matrix.hpp"

namespace fusionlab {

/// Measurement channel 1..4 = c_H, c_V, d_H, d_V.
class ChannelIndex {
  public:
    explicit ChannelIndex(int one_based);
    int value() const noexcept { return value_; }
    /// Column of U that feeds this channel.
    int column() const noexcept { return value_ - 1; }
    friend bool operator==(ChannelIndex, ChannelIndex) = default;
    friend auto operator<=>(ChannelIndex, ChannelIndex) = default;

  private:
    int value_;
};

/// Column-wise quadratic invariants of the first two rows of U.
struct DerivedInvariants {
    std::array<double, 4> m{};
    std::array<double, 4> n{};
    std::array<Complex, 4> t{};
    std::array<double, 4> k{};
};

DerivedInvariants derive_invariants(const FusionMatrix &u);

/// Two-qubit conditional state A f1f3 + B f1f4 + C f2f3 + D f2f4.
struct StateCoefficients {
    Complex a, b, c, d;

    double norm_squared() const { return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d); }
    StateCoefficients scaled(Complex s) const { return {a * s, b * s, c * s, d * s}; }
    StateCoefficients normalized() const;
};

inline constexpr double kZeroProbability = 1e-14;

struct OutcomeCoefficients {
    ChannelIndex i{1};
    ChannelIndex j{1};
    /// Normalized state, or the raw (unnormalized) coefficients when the
    /// outcome has zero probability.
    StateCoefficients state{};
    /// Norm of the raw coefficient vector: sqrt(4p) for i != j, sqrt(2p) for i == j.
    double norm = 0.0;
    double probability = 0.0;
    bool relevant = false;
    bool zero_probability = false;

    /// state * norm, i.e. the coefficients before normalization.
    StateCoefficients raw() const;
};

/// Closed-form outcome probability, clamped to [0, 1/4] when the excursion
/// is below 1e-12; larger excursions throw ConsistencyError.
double outcome_probability(const FusionMatrix &u, ChannelIndex i, ChannelIndex j);
double outcome_probability(const Matrix4 &u, int col_i, int col_j);

OutcomeCoefficients outcome_coefficients(const FusionMatrix &u, ChannelIndex i, ChannelIndex j);
OutcomeCoefficients outcome_coefficients(const Matrix4 &u, int col_i, int col_j);

inline constexpr int kOutcomeCount = 10;

/// Fixed order: (1,1),(2,2),(3,3),(4,4),(1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
constexpr std::array<std::array<int, 2>, kOutcomeCount> kOutcomeOrder{{
    {1, 1}, {2, 2}, {3, 3}, {4, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4},
}};

struct OutcomeTable {
    std::array<OutcomeCoefficients, kOutcomeCount> entries{};

    double total_probability() const;
    const OutcomeCoefficients &at(int i, int j) const;
};

OutcomeTable outcome_table(const FusionMatrix &u);
OutcomeTable outcome_table(const Matrix4 &u);

/// 1/2 (1 + sum n_i^2): probability of landing in any i != j outcome.
double total_relevant_probability(const FusionMatrix &u);
double total_relevant_probability(const Matrix4 &u);

}  // namespace fusionlab
