#include "fusionlab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fusionlab/entangle.hpp"

namespace fusionlab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);

Complex unit(double angle) { return std::polar(1.0, angle); }

}  // namespace

double wrap_two_pi(double x) {
    double r = std::fmod(x, 2.0 * kPi);
    if (r < 0.0) {
        r += 2.0 * kPi;
    }
    return r >= 2.0 * kPi ? 0.0 : r;
}

double wrap_pi(double x) {
    double r = wrap_two_pi(x);
    return r > kPi ? r - 2.0 * kPi : r;
}

StateCoefficients reconstruct(const WeightedGraphParams &p) {
    Complex e1 = unit(p.theta1) * kInvSqrt2;
    Complex e2 = unit(p.theta2) * kInvSqrt2;
    return {e1 * std::cos(p.phi1), e1 * kI * std::sin(p.phi1), e2 * kI * std::sin(p.phi2), e2 * std::cos(p.phi2)};
}

StateCoefficients reconstruct(const ClusterParams &p) {
    return reconstruct(WeightedGraphParams{p.theta1, p.phi, p.theta2, p.phi, kPi});
}

StateCoefficients reconstruct(const MaxEntangledParams &p) {
    double c = std::cos(p.phi) * kInvSqrt2;
    double s = std::sin(p.phi) * kInvSqrt2;
    return {unit(p.theta_a) * c, unit(p.theta_b) * s, unit(p.theta_a + p.theta_d - p.theta_b) * s,
            -unit(p.theta_d) * c};
}

double max_component_distance(const StateCoefficients &x, const StateCoefficients &y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

bool is_product(const StateCoefficients &s, double tol) { return std::abs(s.a * s.d - s.b * s.c) <= tol; }

std::optional<StabilizerParams> is_stabilizer(const StateCoefficients &s, double tol) {
    double ma = std::abs(s.a);
    double mb = std::abs(s.b);
    double mc = std::abs(s.c);
    double md = std::abs(s.d);
    if (mb <= tol && mc <= tol && std::abs(ma - md) <= tol && ma > tol) {
        return StabilizerParams{wrap_pi(std::arg(s.d) - std::arg(s.a))};
    }
    if (ma <= tol && md <= tol && std::abs(mb - mc) <= tol && mb > tol) {
        return StabilizerParams{wrap_pi(std::arg(s.c) - std::arg(s.b))};
    }
    return std::nullopt;
}

WeightedGraphParams fit_weighted_graph(const StateCoefficients &s) {
    const double root2 = std::sqrt(2.0);
    auto fit_half = [](Complex diag, Complex off) {
        // diag = e^{i theta} cos(phi), off = i e^{i theta} sin(phi)
        double theta = std::abs(diag) >= std::abs(off) ? std::arg(diag) : std::arg(off) - kPi / 2.0;
        Complex rot = unit(-theta);
        double phi = std::atan2((-kI * off * rot).real(), (diag * rot).real());
        return std::pair{theta, phi};
    };
    auto [theta1, phi1] = fit_half(root2 * s.a, root2 * s.b);
    auto [theta2, phi2] = fit_half(root2 * s.d, root2 * s.c);
    WeightedGraphParams p;
    p.theta1 = wrap_pi(theta1);
    p.phi1 = phi1;
    p.theta2 = wrap_pi(theta2);
    p.phi2 = phi2;
    p.chi = wrap_two_pi(2.0 * (phi1 - phi2) + kPi);
    return p;
}

std::optional<WeightedGraphParams> is_weighted_graph(const StateCoefficients &s, double tol, NeighborArity arity) {
    if (arity == NeighborArity::Two) {
        if (!is_stabilizer(s, tol)) {
            return std::nullopt;
        }
        return fit_weighted_graph(s);
    }
    double upper = std::norm(s.a) + std::norm(s.b);
    double lower = std::norm(s.c) + std::norm(s.d);
    if (std::abs(upper - 0.5) > tol || std::abs(lower - 0.5) > tol) {
        return std::nullopt;
    }
    if (std::abs((s.a * std::conj(s.b)).real()) > tol || std::abs((s.c * std::conj(s.d)).real()) > tol) {
        return std::nullopt;
    }
    return fit_weighted_graph(s);
}

std::optional<ClusterParams> is_cluster_up_to_rotation(const StateCoefficients &s, double tol) {
    // phi and theta1 come from the (A, B) half; theta2 is the least-squares
    // phase for (C, D) at that phi. The residual check decides.
    WeightedGraphParams wg = fit_weighted_graph(s);
    double c = std::cos(wg.phi1);
    double sn = std::sin(wg.phi1);
    Complex theta2_dir = c * s.d - kI * sn * s.c;
    ClusterParams p{wg.theta1, std::abs(theta2_dir) > 0.0 ? std::arg(theta2_dir) : 0.0, wg.phi1};
    if (max_component_distance(reconstruct(p), s) > tol) {
        return std::nullopt;
    }
    return p;
}

std::optional<MaxEntangledParams> max_entangled_params(const StateCoefficients &s, double tol) {
    if (std::abs(determinant(s) - 0.25) > tol) {
        return std::nullopt;
    }
    MaxEntangledParams p;
    p.phi = std::atan2(std::abs(s.b), std::abs(s.a));
    p.theta_a = std::arg(s.a);
    p.theta_b = std::arg(s.b);
    // theta_d is shared between C and D; fit it to both, weighted by magnitude.
    Complex dir = -s.d * std::cos(p.phi) + s.c * unit(p.theta_b - p.theta_a) * std::sin(p.phi);
    p.theta_d = std::arg(dir);
    p.theta_a = wrap_pi(p.theta_a);
    p.theta_b = wrap_pi(p.theta_b);
    p.theta_d = wrap_pi(p.theta_d);
    return p;
}

bool StateClass::generic() const { return !product && !stabilizer && !weighted_graph && !cluster && !max_entangled; }

std::vector<std::string> StateClass::labels() const {
    std::vector<std::string> out;
    if (product) {
        out.emplace_back("Product");
    }
    if (stabilizer) {
        out.emplace_back("Stabilizer");
    }
    if (weighted_graph) {
        out.emplace_back("WeightedGraph");
    }
    if (cluster) {
        out.emplace_back("ClusterUpToRotation");
    }
    if (max_entangled) {
        out.emplace_back("MaxEntangledGeneric");
    }
    if (generic()) {
        out.emplace_back("Generic");
    }
    return out;
}

StateClass classify(const StateCoefficients &s, NeighborArity arity, double tol) {
    StateClass out;
    out.arity = arity;
    out.product = is_product(s, tol);
    out.stabilizer = is_stabilizer(s, tol);
    out.weighted_graph = is_weighted_graph(s, tol, arity);
    out.cluster = is_cluster_up_to_rotation(s, tol);
    out.max_entangled = max_entangled_params(s, tol);

    // Hierarchy: stabilizer and cluster-form states are maximally entangled,
    // and for a single neighbour the cluster form is a chi = pi weighted graph.
    if ((out.stabilizer || out.cluster) && !out.max_entangled) {
        out.max_entangled = max_entangled_params(s, 1.0);
    }
    if (arity == NeighborArity::One && out.cluster && !out.weighted_graph) {
        out.weighted_graph = fit_weighted_graph(s);
    }
    return out;
}

StateClass classify(const OutcomeCoefficients &c, NeighborArity arity, double tol) {
    if (c.zero_probability) {
        StateClass out;
        out.arity = arity;
        out.zero_probability = true;
        out.product = true;
        return out;
    }
    return classify(c.state, arity, tol);
}

}  // namespace fusionlab
