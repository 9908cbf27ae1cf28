#pragma once

#include <Eigen/Core>
#include <utility>

#include "fusionlab/fusion.hpp"

namespace fusionlab {

using ReducedDensity = Eigen::Matrix2cd;

enum class EntropyBase { Bits, Nats };

/// Von Neumann entropy, stored in bits.
struct EntropyValue {
    double bits = 0.0;

    double nats() const;
    double in(EntropyBase base) const { return base == EntropyBase::Bits ? bits : nats(); }
};

/// Singular values of [[A, B], [C, D]], alpha >= beta >= 0.
struct SchmidtPair {
    double alpha = 1.0;
    double beta = 0.0;
};

/// rho = Tr_{f3,f4} |psi><psi| for a normalized conditional state.
ReducedDensity reduced_density(const StateCoefficients &s);
ReducedDensity reduced_density(const OutcomeCoefficients &c);

/// |AD - BC|^2, equal to det(rho) for normalized coefficients.
double determinant(const StateCoefficients &s);
double determinant(const OutcomeCoefficients &c);

/// |(U1i U2j - U1j U2i)(U3j U4i - U3i U4j) / (4 p_ij)|^2, the determinant
/// expressed through the matrix elements. Relevant outcomes only.
double factored_determinant(const Matrix4 &u, int col_i, int col_j);
double factored_determinant(const FusionMatrix &u, ChannelIndex i, ChannelIndex j);

/// Larger and smaller eigenvalue of a 2x2 density matrix with determinant d.
/// d is clamped into [0, 1/4]; throws OutOfRange beyond 1e-12 of that interval.
/// 1 - 4d <= 1e-14 is treated as exactly maximal.
std::pair<double, double> eigenvalues_from_det(double d);

/// -l log l - (1-l) log(1-l) with 0 log 0 = 0.
EntropyValue entropy(double lambda);
double entropy(double lambda, EntropyBase base);

/// Entropy of the conditional state through the determinant route.
EntropyValue outcome_entropy(const StateCoefficients &s);
EntropyValue outcome_entropy(const OutcomeCoefficients &c);

/// Closed-form 2x2 singular values, computed from the entries of rho rather
/// than its determinant.
SchmidtPair schmidt(const StateCoefficients &s);
SchmidtPair schmidt(const OutcomeCoefficients &c);

inline constexpr double kDefaultMaxEntangledTol = 1e-8;

/// |n_i t_j + n_j t_i| <= tol and |n_i k_j + n_j k_i| <= tol.
bool is_maximally_entangled(const FusionMatrix &u, ChannelIndex i, ChannelIndex j,
                            double tol = kDefaultMaxEntangledTol);

}  // namespace fusionlab
