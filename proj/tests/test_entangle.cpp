#include <gtest/gtest.h>

#include <Eigen/LU>

#include "fusionlab/entangle.hpp"
#include "fusionlab/errors.hpp"
#include "test_util.hpp"

using namespace fusionlab;
using fusionlab::testing::bell;
using fusionlab::testing::kRt2;
using fusionlab::testing::weighted_example;

TEST(entangle, reduced_density_examples) {
    ReducedDensity p = reduced_density(StateCoefficients{1, 0, 0, 0});
    EXPECT_EQ(p(0, 0).real(), 1.0);
    EXPECT_EQ(std::abs(p(1, 1)), 0.0);
    ReducedDensity b = reduced_density(bell());
    EXPECT_NEAR(b(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(b(0, 1)), 0.0, 1e-15);
    ReducedDensity w = reduced_density(weighted_example());
    EXPECT_NEAR(w(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(w(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(w(0, 1).real(), 0.0, 1e-15);
    EXPECT_NEAR(w(0, 1).imag(), -1 / (2 * kRt2), 1e-15);
    EXPECT_NEAR(w(1, 0).imag(), 1 / (2 * kRt2), 1e-15);
}

TEST(entangle, determinant_examples) {
    EXPECT_NEAR(determinant(bell()), 0.25, 1e-15);
    EXPECT_EQ(determinant(StateCoefficients{1, 0, 0, 0}), 0.0);
    FusionMatrix pbs2 = builtin_matrix("pbs2");
    EXPECT_NEAR(factored_determinant(pbs2, ChannelIndex(1), ChannelIndex(3)), 0.25, 1e-14);
    EXPECT_NEAR(determinant(outcome_coefficients(pbs2, ChannelIndex(1), ChannelIndex(3))), 0.25, 1e-14);
    EXPECT_THROW(determinant(outcome_coefficients(pbs2, ChannelIndex(1), ChannelIndex(2))), ZeroProbabilityOutcome);
    EXPECT_THROW(reduced_density(outcome_coefficients(pbs2, ChannelIndex(3), ChannelIndex(4))), ZeroProbabilityOutcome);
}

TEST(entangle, eigenvalues_and_entropy) {
    auto [l1, s1] = eigenvalues_from_det(0.25);
    EXPECT_NEAR(l1, 0.5, 1e-15);
    EXPECT_NEAR(s1, 0.5, 1e-15);
    auto [l0, s0] = eigenvalues_from_det(0.0);
    EXPECT_EQ(l0, 1.0);
    EXPECT_EQ(s0, 0.0);
    auto [l8, s8] = eigenvalues_from_det(0.125);
    EXPECT_NEAR(l8, (1 + 1 / kRt2) / 2, 1e-15);
    EXPECT_NEAR(s8, (1 - 1 / kRt2) / 2, 1e-15);
    EXPECT_NEAR(l8, 0.85355, 1e-5);
    EXPECT_THROW(eigenvalues_from_det(-1e-9), OutOfRange);
    EXPECT_THROW(eigenvalues_from_det(0.25 + 1e-9), OutOfRange);
    EXPECT_NO_THROW(eigenvalues_from_det(0.25 + 1e-13));

    EXPECT_EQ(entropy(0.5).bits, 1.0);
    EXPECT_EQ(entropy(1.0).bits, 0.0);
    EXPECT_EQ(entropy(0.0).bits, 0.0);
    // -l log2 l - (1-l) log2 (1-l) at l = (1 + 1/sqrt2)/2.
    EXPECT_NEAR(entropy(l8).bits, 0.6008760366928562, 1e-12);
    EXPECT_NEAR(entropy(0.85355).bits, 0.60088, 1e-5);
    EXPECT_NEAR(entropy(0.5, EntropyBase::Nats), std::log(2.0), 1e-15);
    EXPECT_THROW(entropy(1.5), OutOfRange);
}

TEST(entangle, schmidt_examples) {
    SchmidtPair b = schmidt(bell());
    EXPECT_NEAR(b.alpha, 1 / kRt2, 1e-15);
    EXPECT_NEAR(b.beta, 1 / kRt2, 1e-15);
    SchmidtPair p = schmidt(StateCoefficients{1, 0, 0, 0});
    EXPECT_EQ(p.alpha, 1.0);
    EXPECT_EQ(p.beta, 0.0);
    SchmidtPair w = schmidt(weighted_example());
    EXPECT_NEAR(w.alpha, std::cos(std::numbers::pi / 8), 1e-15);
    EXPECT_NEAR(w.beta, std::sin(std::numbers::pi / 8), 1e-15);
    EXPECT_NEAR(w.alpha, 0.92388, 1e-5);
    EXPECT_NEAR(w.beta, 0.38268, 1e-5);
}

TEST(entangle, max_entangled_examples) {
    FusionMatrix pbs2 = builtin_matrix("pbs2");
    EXPECT_TRUE(is_maximally_entangled(pbs2, ChannelIndex(1), ChannelIndex(3)));
    EXPECT_FALSE(is_maximally_entangled(builtin_matrix("identity"), ChannelIndex(1), ChannelIndex(3)));
    EXPECT_TRUE(is_maximally_entangled(builtin_matrix("theorem7"), ChannelIndex(1), ChannelIndex(2)));
    EXPECT_THROW(is_maximally_entangled(pbs2, ChannelIndex(2), ChannelIndex(2)), OutOfRange);
    EXPECT_THROW(is_maximally_entangled(pbs2, ChannelIndex(1), ChannelIndex(2)), ZeroProbabilityOutcome);
}

TEST(entangle, random_state_properties) {
    Rng rng(8);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10000; ++trial) {
        StateCoefficients s =
            StateCoefficients{Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)),
                              Complex(g(rng), g(rng))}
                .normalized();
        ReducedDensity rho = reduced_density(s);
        EXPECT_LE((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
        double d = determinant(s);
        EXPECT_NEAR(d, rho.determinant().real(), 1e-12);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 0.25 + 1e-12);
        SchmidtPair sp = schmidt(s);
        EXPECT_GE(sp.alpha, sp.beta);
        EXPECT_NEAR(sp.alpha * sp.alpha + sp.beta * sp.beta, 1.0, 1e-12);
        EXPECT_NEAR(sp.alpha * sp.beta, std::sqrt(d), 1e-9);
        EXPECT_NEAR(entropy(sp.alpha * sp.alpha).bits, outcome_entropy(s).bits, 1e-9);
    }
}

TEST(entangle, factored_determinant_and_max_entangled_random) {
    Rng rng(555);
    int agree = 0;
    int total = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        FusionMatrix u = haar_sample(rng);
        for (int i = 1; i <= 4; ++i) {
            for (int j = i + 1; j <= 4; ++j) {
                OutcomeCoefficients o = outcome_coefficients(u, ChannelIndex(i), ChannelIndex(j));
                if (o.probability <= 1e-6) {
                    continue;
                }
                double d = determinant(o);
                EXPECT_NEAR(factored_determinant(u, ChannelIndex(i), ChannelIndex(j)), d, 1e-12);
                bool conditions = is_maximally_entangled(u, ChannelIndex(i), ChannelIndex(j), 1e-8);
                bool quarter = std::abs(d - 0.25) <= 1e-7;
                ++total;
                agree += conditions == quarter;
            }
        }
    }
    EXPECT_EQ(agree, total);
}

TEST(entangle, max_entangled_conditions_on_maximal_matrices) {
    for (const char *name : {"pbs2", "theorem7"}) {
        FusionMatrix u = builtin_matrix(name);
        for (int i = 1; i <= 4; ++i) {
            for (int j = i + 1; j <= 4; ++j) {
                OutcomeCoefficients o = outcome_coefficients(u, ChannelIndex(i), ChannelIndex(j));
                if (o.probability <= 1e-8) {
                    continue;
                }
                EXPECT_TRUE(is_maximally_entangled(u, ChannelIndex(i), ChannelIndex(j)));
                EXPECT_NEAR(determinant(o), 0.25, 1e-12);
            }
        }
    }
}
