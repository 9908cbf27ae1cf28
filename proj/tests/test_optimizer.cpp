#include <gtest/gtest.h>

#include <cmath>

#include "fusionlab/errors.hpp"
#include "fusionlab/optimizer.hpp"

using namespace fusionlab;

namespace {

OptimizerConfig small_config(std::uint64_t seed = 3) {
    OptimizerConfig c;
    c.restarts = 3;
    c.init_samples = 20;
    c.iterations = 150;
    c.polish_iterations = 100;
    c.master_seed = seed;
    c.threads = 2;
    return c;
}

}  // namespace

TEST(Objectives, ExpectationEntropyExamples) {
    EXPECT_NEAR(expectation_entropy(builtin_matrix("pbs2")), 0.5, 1e-12);
    EXPECT_NEAR(expectation_entropy(builtin_matrix("identity")), 0.0, 1e-12);
    EXPECT_NEAR(expectation_entropy(builtin_matrix("theorem7")), 0.5, 1e-12);
}

TEST(Objectives, ThresholdProbabilityExamples) {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) {
        EXPECT_EQ(threshold_probability(haar_sample(rng), 0.0), 1.0);
    }
    EXPECT_NEAR(threshold_probability(builtin_matrix("pbs2"), 1.0), 0.5, 1e-12);
    EXPECT_NEAR(threshold_probability(builtin_matrix("theorem7"), 1.0), 0.5, 1e-12);
    EXPECT_EQ(threshold_probability(builtin_matrix("identity"), 0.01), 0.0);
}

TEST(Objectives, CostExpectationExamples) {
    EXPECT_NEAR(cost_expectation(builtin_matrix("pbs2"), 0.5, 1.0), kDefaultBaseline - 0.5, 1e-12);
    EXPECT_NEAR(cost_expectation(builtin_matrix("identity"), 1.0, 1.0), kDefaultBaseline, 1e-12);
    EXPECT_NEAR(cost_expectation(builtin_matrix("pbs2"), 1.0, 1.0), kDefaultBaseline + 0.25 - 0.5, 1e-12);
}

TEST(Objectives, CostThresholdExamples) {
    EXPECT_NEAR(cost_threshold(builtin_matrix("pbs2"), 1.0, 1e-6), -0.25, 1e-9);
    EXPECT_NEAR(cost_threshold(builtin_matrix("identity"), 0.5, 1e-3), 0.0, 1e-12);
    EXPECT_THROW(cost_threshold(builtin_matrix("pbs2"), 0.5, 0.0), OutOfRange);
}

TEST(Objectives, CostThresholdMonotoneInTarget) {
    Rng rng(5);
    for (int k = 0; k < 200; ++k) {
        OutcomeSummary s = summarize(haar_sample(rng).matrix());
        for (double tau : {0.1, 0.01, 0.001}) {
            double prev = cost_threshold(s, 1.0, tau);
            for (int j = 9; j >= 0; --j) {
                double c = cost_threshold(s, j / 10.0, tau);
                EXPECT_LE(c, prev + 1e-15);
                prev = c;
            }
        }
    }
}

TEST(Objectives, HalfBoundOnSamples) {
    Rng rng(21);
    double worst = 0.0;
    for (int k = 0; k < 20000; ++k) {
        OutcomeSummary s = summarize(haar_sample(rng).matrix());
        worst = std::max(worst, threshold_probability(s, 1.0));
        EXPECT_GE(s.total_relevant, 0.5 - 1e-12);
        EXPECT_LE(expectation_entropy(s), s.total_relevant + 1e-12);
    }
    EXPECT_LE(worst, 0.5 + 1e-9);
}

TEST(Objectives, BlockpairHasOnlyProductRelevantStates) {
    OutcomeSummary s = summarize(builtin_matrix("blockpair").matrix());
    EXPECT_NEAR(s.total_relevant, 1.0, 1e-12);
    for (int k = 0; k < kOutcomeCount; ++k) {
        if (s.relevant[k] && s.probability[k] > 1e-9) {
            EXPECT_LE(s.entropy_bits[k], 1e-9);
        }
    }
}

TEST(Objectives, StatesUsed) {
    EXPECT_EQ(states_used(summarize(builtin_matrix("pbs2").matrix()), 1.0), 4);
    EXPECT_EQ(states_used(summarize(builtin_matrix("identity").matrix()), 0.5), 0);
}

TEST(Objectives, Validation) {
    EXPECT_THROW(validate_objective(ThresholdObjective{1.5}), OutOfRange);
    EXPECT_THROW(validate_objective(ThresholdObjective{-0.1}), OutOfRange);
    EXPECT_THROW(validate_objective(ExpectationObjective{0.4, 1.0}), OutOfRange);
    EXPECT_THROW(validate_objective(ExpectationObjective{0.7, -1.0}), OutOfRange);
    EXPECT_NO_THROW(validate_objective(ExpectationObjective{1.0, 1.0}));
    OptimizerConfig c;
    c.restarts = 0;
    EXPECT_THROW(c.validate(), OutOfRange);
    c = OptimizerConfig{};
    c.step = 0.0;
    EXPECT_THROW(c.validate(), OutOfRange);
    c = OptimizerConfig{};
    c.anneal_schedule.clear();
    EXPECT_THROW(c.validate(), OutOfRange);
}

TEST(Optimize, ThresholdAtOneSaturates) {
    OptResult r = optimize(ThresholdObjective{1.0}, small_config());
    EXPECT_GE(r.hard_value, 0.499);
    EXPECT_LE(r.hard_value, 0.5 + 1e-9);
    DerivedInvariants inv = derive_invariants(r.best_matrix);
    for (double n : inv.n) {
        EXPECT_LE(std::abs(n), 1e-3);
    }
    EXPECT_NEAR(r.hard_value, threshold_probability(r.best_matrix, 1.0), 0.0);
    EXPECT_EQ(r.restarts.size(), 3u);
}

TEST(Optimize, ExpectationEndpoints) {
    OptResult half = optimize(ExpectationObjective{0.5, 1.0}, small_config());
    EXPECT_GE(half.hard_value, 0.49);
    OptResult one = optimize(ExpectationObjective{1.0, 1.0}, small_config());
    EXPECT_LE(one.hard_value, 0.01);
    EXPECT_NEAR(one.p_total, 1.0, 0.01);
}

TEST(Optimize, DeterministicPerSeedAndThreadCount) {
    OptimizerConfig c = small_config(9);
    c.iterations = 60;
    OptResult a = optimize(ThresholdObjective{0.5}, c);
    c.threads = 1;
    OptResult b = optimize(ThresholdObjective{0.5}, c);
    EXPECT_EQ(a.best_matrix.matrix(), b.best_matrix.matrix());
    EXPECT_EQ(a.hard_value, b.hard_value);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(Optimize, BestIsMaxOverRestarts) {
    OptimizerConfig c = small_config(4);
    c.iterations = 60;
    OptResult r = optimize(ThresholdObjective{0.3}, c);
    for (const auto &x : r.restarts) {
        EXPECT_LE(x.hard_value, r.hard_value);
    }
    EXPECT_LE(r.mean_hard_value(), r.hard_value);
    EXPECT_EQ(r.trace.size(), 60u);
}

TEST(Sweep, ThresholdEndpoints) {
    OptimizerConfig c = small_config(2);
    auto rows = sweep(ObjectiveKind::Threshold, {0.0, 1.0}, c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].hard_value, 1.0);
    EXPECT_GE(rows[1].hard_value, 0.499);
    EXPECT_EQ(rows[0].seed, derive_seed(2, 0));
    EXPECT_EQ(rows[1].seed, derive_seed(2, 1));
}

TEST(Scatter, ExpectationBoundsAndStats) {
    ScatterResult r = random_scatter(2000, 7, ObjectiveKind::Expectation);
    ASSERT_EQ(r.points.size(), 2000u);
    ASSERT_EQ(r.summaries.size(), 2u);
    for (const auto &p : r.points) {
        EXPECT_GE(p.x, 0.5 - 1e-12);
        EXPECT_LE(p.x, 1.0 + 1e-12);
        EXPECT_LE(p.y, p.x + 1e-12);
    }
    EXPECT_EQ(r.summaries[0].count, 2000);
    ScatterResult again = random_scatter(2000, 7, ObjectiveKind::Expectation);
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        EXPECT_EQ(r.points[k].x, again.points[k].x);
        EXPECT_EQ(r.points[k].y, again.points[k].y);
    }
}

TEST(Scatter, ThresholdRows) {
    ScatterResult r = random_scatter(100, 1, ObjectiveKind::Threshold, {0.0, 0.5, 1.0});
    ASSERT_EQ(r.points.size(), 300u);
    EXPECT_EQ(r.summaries[0].mean, 1.0);
    EXPECT_LE(r.summaries[2].mean, 0.5);
    EXPECT_THROW(random_scatter(0, 1, ObjectiveKind::Expectation), OutOfRange);
    EXPECT_THROW(random_scatter(10, 1, ObjectiveKind::Threshold), OutOfRange);
}

TEST(RunningStats, MatchesTwoPass) {
    RunningStats s;
    for (double x : {1.0, 2.0, 4.0, 7.0}) {
        s.add(x);
    }
    EXPECT_DOUBLE_EQ(s.mean, 3.5);
    EXPECT_NEAR(s.variance(), 7.0, 1e-12);
}
