#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "fusionlab/entangle.hpp"
#include "fusionlab/fusion.hpp"

namespace fusionlab {

/// Per-outcome quantities the objectives need, in kOutcomeOrder.
struct OutcomeSummary {
    std::array<double, kOutcomeCount> probability{};
    std::array<double, kOutcomeCount> det{};
    std::array<double, kOutcomeCount> entropy_bits{};
    std::array<bool, kOutcomeCount> relevant{};
    double total_relevant = 0.0;
};

OutcomeSummary summarize(const Matrix4 &u);

/// sum over relevant outcomes of p_ij S_ij, in bits.
double expectation_entropy(const FusionMatrix &u);
double expectation_entropy(const OutcomeSummary &s);

/// Probability mass of outcomes with S >= s_target, normalized by the table
/// total so that s_target = 0 gives exactly 1.
double threshold_probability(const FusionMatrix &u, double s_target_bits);
double threshold_probability(const OutcomeSummary &s, double s_target_bits);

inline constexpr double kDefaultBaseline = 2.0;

/// baseline + alpha (p_total - p_target)^2 - <S>
double cost_expectation(const FusionMatrix &u, double p_target, double alpha, double baseline = kDefaultBaseline);
double cost_expectation(const OutcomeSummary &s, double p_target, double alpha, double baseline = kDefaultBaseline);

/// -sum p sigma((S - s_target) / tau) with the logistic sigma.
double cost_threshold(const FusionMatrix &u, double s_target_bits, double tau);
double cost_threshold(const OutcomeSummary &s, double s_target_bits, double tau);

/// Relevant outcomes with p > 1e-6 and S >= s_target - 1e-9.
int states_used(const OutcomeSummary &s, double s_target_bits);

struct ExpectationObjective {
    double p_target = 0.5;
    double alpha = 1.0;
};

struct ThresholdObjective {
    double s_target_bits = 1.0;
};

using ObjectiveSpec = std::variant<ExpectationObjective, ThresholdObjective>;

/// Throws OutOfRange for p_target outside [1/2, 1] or s_target outside [0, 1].
void validate_objective(const ObjectiveSpec &obj);

struct OptimizerConfig {
    int restarts = 20;
    int init_samples = 100;
    /// Descent steps, split evenly across the stages.
    int iterations = 1000;
    double step = 0.001;
    double momentum = 0.9;
    double fd_epsilon = 1e-5;
    std::uint64_t master_seed = 0;
    /// Logistic temperatures for the threshold objective.
    std::vector<double> anneal_schedule{0.1, 0.01, 0.001};
    /// Multipliers on alpha for the expectation objective, one stage each.
    std::vector<double> alpha_ramp{1.0, 10.0, 100.0, 1000.0};
    /// Threshold objective: steps of the final pass that lifts near-threshold
    /// outcomes over s_target. 0 disables it.
    int polish_iterations = 300;
    /// Worker threads; 0 reads FUSIONLAB_THREADS, then hardware concurrency.
    int threads = 0;

    /// Throws OutOfRange on counts < 1, non-positive step or epsilon, etc.
    void validate() const;
};

struct RestartOutcome {
    std::uint64_t seed = 0;
    double hard_value = 0.0;
    /// Cost used to rank restarts (lower is better).
    double rank_cost = 0.0;
};

struct OptResult {
    FusionMatrix best_matrix = builtin_matrix("identity");
    /// Smoothed cost at the best point, using the last stage's tau or alpha.
    double objective_value = 0.0;
    /// <S> or P(s_target) recomputed from best_matrix.
    double hard_value = 0.0;
    double p_total = 0.0;
    double expectation = 0.0;
    int states_used = 0;
    int best_restart = 0;
    std::uint64_t seed = 0;
    /// Smoothed cost per descent step of the best restart.
    std::vector<double> trace;
    std::vector<RestartOutcome> restarts;

    double mean_hard_value() const;
};

OptResult optimize(const ObjectiveSpec &obj, const OptimizerConfig &cfg);

struct SweepRow {
    double target = 0.0;
    double hard_value = 0.0;
    double mean_hard_value = 0.0;
    double p_total = 0.0;
    int states_used = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
    FusionMatrix matrix = builtin_matrix("identity");
};

enum class ObjectiveKind { Expectation, Threshold };

/// One optimize() per target; target k uses master seed derive_seed(cfg.master_seed, k).
/// For the expectation kind, alpha is the base penalty weight.
std::vector<SweepRow> sweep(ObjectiveKind kind, const std::vector<double> &targets, const OptimizerConfig &cfg,
                            double alpha = 1.0);

struct RunningStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    double variance() const;
    double stddev() const;
};

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
};

struct ScatterResult {
    /// Expectation mode: (p_total, <S>). Threshold mode: (s_target, P), one
    /// row per sample and target.
    std::vector<ScatterPoint> points;
    /// Expectation mode: one entry each for p_total and <S>. Threshold mode:
    /// one entry for P per target.
    std::vector<RunningStats> summaries;
};

ScatterResult random_scatter(int n, std::uint64_t seed, ObjectiveKind kind, const std::vector<double> &s_targets = {});

/// Worker count from FUSIONLAB_THREADS or the hardware, at least 1.
int default_thread_count();

}  // namespace fusionlab
