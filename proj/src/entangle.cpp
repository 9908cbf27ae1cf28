#include "fusionlab/entangle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

constexpr double kDetSlack = 1e-12;
// 1 - 4d below this is rounding of a maximally entangled state.
constexpr double kMaximalSnap = 1e-14;

void require_nonzero(const OutcomeCoefficients &c) {
    if (c.zero_probability) {
        throw ZeroProbabilityOutcome("outcome (" + std::to_string(c.i.value()) + "," + std::to_string(c.j.value()) +
                                     ") has zero probability");
    }
}

double xlog2x(double x) { return x <= 0.0 ? 0.0 : x * std::log2(x); }

}  // namespace

double EntropyValue::nats() const { return bits * std::numbers::ln2; }

ReducedDensity reduced_density(const StateCoefficients &s) {
    ReducedDensity rho;
    rho(0, 0) = std::norm(s.a) + std::norm(s.b);
    rho(0, 1) = std::conj(s.a) * s.c + std::conj(s.b) * s.d;
    rho(1, 0) = s.a * std::conj(s.c) + s.b * std::conj(s.d);
    rho(1, 1) = std::norm(s.c) + std::norm(s.d);
    return rho;
}

ReducedDensity reduced_density(const OutcomeCoefficients &c) {
    require_nonzero(c);
    return reduced_density(c.state);
}

double determinant(const StateCoefficients &s) { return std::norm(s.a * s.d - s.b * s.c); }

double determinant(const OutcomeCoefficients &c) {
    require_nonzero(c);
    return determinant(c.state);
}

double factored_determinant(const Matrix4 &u, int i, int j) {
    double p = outcome_probability(u, i, j);
    if (p <= kZeroProbability) {
        throw ZeroProbabilityOutcome("factored determinant needs a nonzero outcome probability");
    }
    Complex top = u(0, i) * u(1, j) - u(0, j) * u(1, i);
    Complex bottom = u(2, j) * u(3, i) - u(2, i) * u(3, j);
    return std::norm(top * bottom / (4.0 * p));
}

double factored_determinant(const FusionMatrix &u, ChannelIndex i, ChannelIndex j) {
    if (i == j) {
        throw OutOfRange("factored determinant is defined for i != j");
    }
    return factored_determinant(u.matrix(), i.column(), j.column());
}

std::pair<double, double> eigenvalues_from_det(double d) {
    if (!(d >= -kDetSlack && d <= 0.25 + kDetSlack)) {
        throw OutOfRange("determinant " + std::to_string(d) + " outside [0, 1/4]");
    }
    double disc = 1.0 - 4.0 * d;
    double root = disc > kMaximalSnap ? std::sqrt(disc) : 0.0;
    if (root > 1.0) {
        root = 1.0;
    }
    double lambda = 0.5 * (1.0 + root);
    return {lambda, 0.5 * (1.0 - root)};
}

EntropyValue entropy(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw OutOfRange("eigenvalue " + std::to_string(lambda) + " outside [0, 1]");
    }
    return {-xlog2x(lambda) - xlog2x(1.0 - lambda)};
}

double entropy(double lambda, EntropyBase base) { return entropy(lambda).in(base); }

EntropyValue outcome_entropy(const StateCoefficients &s) { return entropy(eigenvalues_from_det(determinant(s)).first); }

EntropyValue outcome_entropy(const OutcomeCoefficients &c) {
    require_nonzero(c);
    return outcome_entropy(c.state);
}

SchmidtPair schmidt(const StateCoefficients &s) {
    // M M^dagger for M = [[A, B], [C, D]] is rho; its eigenvalues are the
    // squared singular values.
    ReducedDensity rho = reduced_density(s);
    double mean = 0.5 * (rho(0, 0).real() + rho(1, 1).real());
    double half_gap = 0.5 * (rho(0, 0).real() - rho(1, 1).real());
    double spread = std::hypot(half_gap, std::abs(rho(0, 1)));
    double hi = mean + spread;
    double lo = mean - spread;
    SchmidtPair out;
    out.alpha = std::sqrt(hi > 0.0 ? hi : 0.0);
    out.beta = std::sqrt(lo > 0.0 ? lo : 0.0);
    return out;
}

SchmidtPair schmidt(const OutcomeCoefficients &c) {
    require_nonzero(c);
    return schmidt(c.state);
}

bool is_maximally_entangled(const FusionMatrix &u, ChannelIndex i, ChannelIndex j, double tol) {
    if (i == j) {
        throw OutOfRange("maximal entanglement is only defined for relevant outcomes (i != j)");
    }
    double p = outcome_probability(u, i, j);
    if (!(p > tol)) {
        throw ZeroProbabilityOutcome("outcome probability too small to test for maximal entanglement");
    }
    DerivedInvariants inv = derive_invariants(u);
    int a = i.column();
    int b = j.column();
    Complex cond1 = inv.n[a] * inv.t[b] + inv.n[b] * inv.t[a];
    double cond2 = inv.n[a] * inv.k[b] + inv.n[b] * inv.k[a];
    return std::abs(cond1) <= tol && std::abs(cond2) <= tol;
}

}  // namespace fusionlab
