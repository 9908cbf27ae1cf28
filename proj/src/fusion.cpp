#include "fusionlab/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

constexpr double kClampSlack = 1e-12;

double clamp_probability(double p, double upper) {
    if (p < -kClampSlack || p > upper + kClampSlack) {
        throw ConsistencyError("outcome probability " + std::to_string(p) + " outside [0, " + std::to_string(upper) +
                               "]");
    }
    if (p < 0.0) {
        return 0.0;
    }
    return p > upper ? upper : p;
}

double column_weight(const Matrix4 &u, int col) { return std::norm(u(0, col)) + std::norm(u(1, col)); }

}  // namespace

ChannelIndex::ChannelIndex(int one_based) : value_(one_based) {
    if (one_based < 1 || one_based > 4) {
        throw OutOfRange("channel index must be in 1..4, got " + std::to_string(one_based));
    }
}

DerivedInvariants derive_invariants(const FusionMatrix &fm) {
    const Matrix4 &u = fm.matrix();
    DerivedInvariants inv;
    for (int i = 0; i < 4; ++i) {
        double top = std::norm(u(0, i));
        double bottom = std::norm(u(1, i));
        inv.m[i] = top + bottom;
        inv.n[i] = 0.5 - inv.m[i];
        inv.t[i] = u(0, i) * std::conj(u(1, i));
        inv.k[i] = top - bottom;
    }
    return inv;
}

StateCoefficients StateCoefficients::normalized() const {
    double nrm = std::sqrt(norm_squared());
    return scaled(Complex(1.0 / nrm, 0.0));
}

StateCoefficients OutcomeCoefficients::raw() const {
    if (zero_probability) {
        return state;
    }
    return state.scaled(Complex(norm, 0.0));
}

double outcome_probability(const Matrix4 &u, int ci, int cj) {
    if (ci == cj) {
        double m = column_weight(u, ci);
        return clamp_probability(0.5 * m * (1.0 - m), 0.125);
    }
    double ni = 0.5 - column_weight(u, ci);
    double nj = 0.5 - column_weight(u, cj);
    Complex overlap = u(0, ci) * std::conj(u(0, cj)) + u(1, ci) * std::conj(u(1, cj));
    return clamp_probability(0.125 - 0.5 * ni * nj - 0.5 * std::norm(overlap), 0.25);
}

double outcome_probability(const FusionMatrix &u, ChannelIndex i, ChannelIndex j) {
    return outcome_probability(u.matrix(), i.column(), j.column());
}

OutcomeCoefficients outcome_coefficients(const Matrix4 &u, int ci, int cj) {
    OutcomeCoefficients out;
    out.i = ChannelIndex(std::min(ci, cj) + 1);
    out.j = ChannelIndex(std::max(ci, cj) + 1);
    out.relevant = ci != cj;
    StateCoefficients raw;
    if (out.relevant) {
        raw.a = u(0, ci) * u(2, cj) + u(0, cj) * u(2, ci);
        raw.b = u(0, ci) * u(3, cj) + u(0, cj) * u(3, ci);
        raw.c = u(1, ci) * u(2, cj) + u(1, cj) * u(2, ci);
        raw.d = u(1, ci) * u(3, cj) + u(1, cj) * u(3, ci);
    } else {
        raw.a = u(0, ci) * u(2, ci);
        raw.b = u(0, ci) * u(3, ci);
        raw.c = u(1, ci) * u(2, ci);
        raw.d = u(1, ci) * u(3, ci);
    }
    out.probability = outcome_probability(u, ci, cj);
    double n2 = raw.norm_squared();
    out.norm = std::sqrt(n2);
    out.zero_probability = out.probability <= kZeroProbability || n2 <= 4.0 * kZeroProbability;
    if (out.zero_probability) {
        out.state = raw;
    } else {
        out.state = raw.scaled(Complex(1.0 / out.norm, 0.0));
    }
    return out;
}

OutcomeCoefficients outcome_coefficients(const FusionMatrix &u, ChannelIndex i, ChannelIndex j) {
    return outcome_coefficients(u.matrix(), i.column(), j.column());
}

double OutcomeTable::total_probability() const {
    double sum = 0.0;
    for (const auto &e : entries) {
        sum += e.probability;
    }
    return sum;
}

const OutcomeCoefficients &OutcomeTable::at(int i, int j) const {
    if (i > j) {
        std::swap(i, j);
    }
    for (const auto &e : entries) {
        if (e.i.value() == i && e.j.value() == j) {
            return e;
        }
    }
    throw OutOfRange("no outcome (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

OutcomeTable outcome_table(const Matrix4 &u) {
    OutcomeTable table;
    for (int k = 0; k < kOutcomeCount; ++k) {
        table.entries[k] = outcome_coefficients(u, kOutcomeOrder[k][0] - 1, kOutcomeOrder[k][1] - 1);
    }
    return table;
}

OutcomeTable outcome_table(const FusionMatrix &u) { return outcome_table(u.matrix()); }

double total_relevant_probability(const Matrix4 &u) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double n = 0.5 - column_weight(u, i);
        sum += n * n;
    }
    return 0.5 * (1.0 + sum);
}

double total_relevant_probability(const FusionMatrix &u) { return total_relevant_probability(u.matrix()); }

}  // namespace fusionlab
