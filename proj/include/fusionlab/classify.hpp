#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fusionlab/fusion.hpp"

namespace fusionlab {

/// Size of n(b), the neighbourhood of the fused qubit on the second cluster.
enum class NeighborArity { One, Two };

struct StabilizerParams {
    /// D = e^{i Phi} A (or C = e^{i Phi} B), Phi in (-pi, pi].
    double phi = 0.0;
};

/// (A, B) = e^{i theta1}/sqrt2 (cos phi1, i sin phi1),
/// (C, D) = e^{i theta2}/sqrt2 (i sin phi2, cos phi2),
/// chi = 2 (phi1 - phi2) + pi reduced to [0, 2 pi).
struct WeightedGraphParams {
    double theta1 = 0.0;
    double phi1 = 0.0;
    double theta2 = 0.0;
    double phi2 = 0.0;
    double chi = 0.0;
};

/// A, D = e^{i theta_{1,2}} cos(phi)/sqrt2, B, C = i e^{i theta_{1,2}} sin(phi)/sqrt2.
struct ClusterParams {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double phi = 0.0;
};

/// A = e^{i ta} cos(phi)/sqrt2, B = e^{i tb} sin(phi)/sqrt2,
/// C = e^{i (ta + td - tb)} sin(phi)/sqrt2, D = -e^{i td} cos(phi)/sqrt2.
struct MaxEntangledParams {
    double theta_a = 0.0;
    double theta_b = 0.0;
    double theta_d = 0.0;
    double phi = 0.0;
};

inline constexpr double kDefaultClassifyTol = 1e-8;

StateCoefficients reconstruct(const WeightedGraphParams &p);
StateCoefficients reconstruct(const ClusterParams &p);
StateCoefficients reconstruct(const MaxEntangledParams &p);

/// Largest componentwise distance between two coefficient quadruples.
double max_component_distance(const StateCoefficients &x, const StateCoefficients &y);

bool is_product(const StateCoefficients &s, double tol = kDefaultClassifyTol);
std::optional<StabilizerParams> is_stabilizer(const StateCoefficients &s, double tol = kDefaultClassifyTol);
/// For arity Two the predicate holds exactly when the state is a stabilizer state.
std::optional<WeightedGraphParams> is_weighted_graph(const StateCoefficients &s, double tol = kDefaultClassifyTol,
                                                     NeighborArity arity = NeighborArity::One);
std::optional<ClusterParams> is_cluster_up_to_rotation(const StateCoefficients &s, double tol = kDefaultClassifyTol);
std::optional<MaxEntangledParams> max_entangled_params(const StateCoefficients &s, double tol = kDefaultClassifyTol);

/// Fits the weighted-graph parameterization without checking its conditions.
WeightedGraphParams fit_weighted_graph(const StateCoefficients &s);

struct StateClass {
    NeighborArity arity = NeighborArity::One;
    bool zero_probability = false;
    bool product = false;
    std::optional<StabilizerParams> stabilizer;
    std::optional<WeightedGraphParams> weighted_graph;
    std::optional<ClusterParams> cluster;
    std::optional<MaxEntangledParams> max_entangled;

    bool generic() const;
    std::vector<std::string> labels() const;
};

StateClass classify(const StateCoefficients &s, NeighborArity arity, double tol = kDefaultClassifyTol);
/// Zero-probability outcomes are reported as Product with the flag set.
StateClass classify(const OutcomeCoefficients &c, NeighborArity arity, double tol = kDefaultClassifyTol);

/// Reduces an angle to [0, 2 pi).
double wrap_two_pi(double x);
/// Reduces an angle to (-pi, pi].
double wrap_pi(double x);

}  // namespace fusionlab
