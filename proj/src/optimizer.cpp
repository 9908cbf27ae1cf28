#include "fusionlab/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

constexpr double kUsedProbability = 1e-6;
constexpr double kUsedSlack = 1e-9;
// Outcomes this far below s_target are lifted by the polish pass.
constexpr double kPolishWindow = 0.02;
constexpr double kPolishMargin = 1e-12;
// Largest det still short of the snapped maximal region.
constexpr double kMaximalDet = 0.25 - 2e-15;

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// Smallest det whose entropy reaches s_bits.
double det_for_entropy(double s_bits) {
    if (s_bits <= 0.0) {
        return 0.0;
    }
    if (s_bits >= 1.0) {
        return kMaximalDet;
    }
    double lo = 0.0;
    double hi = 0.25;
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (entropy(eigenvalues_from_det(mid).first).bits >= s_bits) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return std::min(hi + kPolishMargin, kMaximalDet);
}

struct Evaluator {
    const ObjectiveSpec &obj;
    double baseline = kDefaultBaseline;

    bool threshold() const { return std::holds_alternative<ThresholdObjective>(obj); }
    double s_target() const { return std::get<ThresholdObjective>(obj).s_target_bits; }
    const ExpectationObjective &expectation() const { return std::get<ExpectationObjective>(obj); }

    // Stage parameter is tau for the threshold objective and the alpha
    // multiplier for the expectation objective.
    double smoothed(const OutcomeSummary &s, double stage) const {
        if (threshold()) {
            return cost_threshold(s, s_target(), stage);
        }
        return cost_expectation(s, expectation().p_target, expectation().alpha * stage, baseline);
    }

    double hard(const OutcomeSummary &s) const {
        return threshold() ? threshold_probability(s, s_target()) : expectation_entropy(s);
    }

    // Lower is better.
    double rank(const OutcomeSummary &s, double final_stage) const {
        if (threshold()) {
            return -threshold_probability(s, s_target());
        }
        double a = expectation().alpha * final_stage;
        double d = s.total_relevant - expectation().p_target;
        return a * d * d - expectation_entropy(s);
    }
};

struct Candidate {
    Matrix4 u;
    double rank = std::numeric_limits<double>::infinity();
    double tie = std::numeric_limits<double>::infinity();

    bool better_than(const Candidate &o) const { return rank < o.rank || (rank == o.rank && tie < o.tie); }
};

Matrix4 point(const Matrix4 &base, const UnitaryParams &p) { return base * unitary_from_params(p); }

struct RestartRun {
    Candidate best;
    std::vector<double> trace;
    double hard = 0.0;
};

double polish_objective(const OutcomeSummary &s, const std::vector<int> &targets, double det_target) {
    double h = 0.0;
    for (int k : targets) {
        h += std::max(0.0, det_target - s.det[k]);
    }
    return h;
}

Matrix4 polish(const Matrix4 &start, double s_target, int iterations, double fd_eps) {
    OutcomeSummary s0 = summarize(start);
    std::vector<int> targets;
    for (int k = 0; k < kOutcomeCount; ++k) {
        if (s0.relevant[k] && s0.probability[k] > kUsedProbability &&
            s0.entropy_bits[k] >= s_target - kPolishWindow) {
            targets.push_back(k);
        }
    }
    if (targets.empty()) {
        return start;
    }
    double det_target = det_for_entropy(s_target);
    Matrix4 base = start;
    double h = polish_objective(s0, targets, det_target);
    double t = 1.0;
    for (int it = 0; it < iterations && h > 0.0; ++it) {
        UnitaryParams zero{};
        UnitaryParams grad{};
        double gnorm2 = 0.0;
        for (int k = 0; k < 16; ++k) {
            UnitaryParams plus = zero;
            UnitaryParams minus = zero;
            plus[k] = fd_eps;
            minus[k] = -fd_eps;
            double fp = polish_objective(summarize(point(base, plus)), targets, det_target);
            double fm = polish_objective(summarize(point(base, minus)), targets, det_target);
            grad[k] = (fp - fm) / (2.0 * fd_eps);
            gnorm2 += grad[k] * grad[k];
        }
        if (gnorm2 == 0.0) {
            break;
        }
        bool moved = false;
        for (int tries = 0; tries < 40; ++tries) {
            UnitaryParams step{};
            for (int k = 0; k < 16; ++k) {
                step[k] = -t * grad[k];
            }
            Matrix4 trial = point(base, step);
            double ht = polish_objective(summarize(trial), targets, det_target);
            if (ht < h) {
                base = trial;
                h = ht;
                t *= 2.0;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            break;
        }
    }
    return base;
}

RestartRun run_restart(const Evaluator &ev, const OptimizerConfig &cfg, std::uint64_t seed) {
    const std::vector<double> &stages = ev.threshold() ? cfg.anneal_schedule : cfg.alpha_ramp;
    const double final_stage = stages.back();
    RestartRun run;
    Rng rng(seed);

    auto consider = [&](const Matrix4 &u, const OutcomeSummary &s) {
        Candidate c{u, ev.rank(s, final_stage), ev.smoothed(s, final_stage)};
        if (c.better_than(run.best)) {
            run.best = c;
        }
    };

    Candidate init;
    for (int k = 0; k < cfg.init_samples; ++k) {
        FusionMatrix h = haar_sample(rng);
        OutcomeSummary s = summarize(h.matrix());
        Candidate c{h.matrix(), ev.rank(s, final_stage), ev.smoothed(s, stages.front())};
        if (c.better_than(init)) {
            init = c;
        }
    }
    consider(init.u, summarize(init.u));

    Matrix4 base = init.u;
    int per_stage = std::max(1, cfg.iterations / static_cast<int>(stages.size()));
    run.trace.reserve(static_cast<std::size_t>(per_stage) * stages.size());
    for (double stage : stages) {
        UnitaryParams p{};
        UnitaryParams v{};
        for (int it = 0; it < per_stage; ++it) {
            UnitaryParams grad{};
            for (int k = 0; k < 16; ++k) {
                UnitaryParams plus = p;
                UnitaryParams minus = p;
                plus[k] += cfg.fd_epsilon;
                minus[k] -= cfg.fd_epsilon;
                double fp = ev.smoothed(summarize(point(base, plus)), stage);
                double fm = ev.smoothed(summarize(point(base, minus)), stage);
                grad[k] = (fp - fm) / (2.0 * cfg.fd_epsilon);
            }
            for (int k = 0; k < 16; ++k) {
                v[k] = cfg.momentum * v[k] - cfg.step * grad[k];
                p[k] += v[k];
            }
            Matrix4 u = point(base, p);
            OutcomeSummary s = summarize(u);
            run.trace.push_back(ev.smoothed(s, stage));
            consider(u, s);
        }
        base = point(base, p);
    }

    if (ev.threshold() && cfg.polish_iterations > 0) {
        for (const Matrix4 &start : {base, Matrix4(run.best.u)}) {
            Matrix4 u = polish(start, ev.s_target(), cfg.polish_iterations, cfg.fd_epsilon);
            consider(u, summarize(u));
        }
    }
    run.hard = ev.hard(summarize(run.best.u));
    return run;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn fn) {
    int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int k = next++; k < count; k = next++) {
                fn(k);
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
}

}  // namespace

OutcomeSummary summarize(const Matrix4 &u) {
    OutcomeTable t = outcome_table(u);
    OutcomeSummary s;
    for (int k = 0; k < kOutcomeCount; ++k) {
        const OutcomeCoefficients &o = t.entries[k];
        s.probability[k] = o.probability;
        s.relevant[k] = o.relevant;
        if (o.zero_probability || !o.relevant) {
            s.det[k] = o.zero_probability ? 0.0 : determinant(o.state);
            s.entropy_bits[k] = 0.0;
        } else {
            s.det[k] = determinant(o.state);
            s.entropy_bits[k] = entropy(eigenvalues_from_det(s.det[k]).first).bits;
        }
        if (o.relevant) {
            s.total_relevant += o.probability;
        }
    }
    return s;
}

double expectation_entropy(const OutcomeSummary &s) {
    double acc = 0.0;
    for (int k = 0; k < kOutcomeCount; ++k) {
        if (s.relevant[k]) {
            acc += s.probability[k] * s.entropy_bits[k];
        }
    }
    return acc;
}

double expectation_entropy(const FusionMatrix &u) { return expectation_entropy(summarize(u.matrix())); }

double threshold_probability(const OutcomeSummary &s, double s_target_bits) {
    double in = 0.0;
    double out = 0.0;
    for (int k = 0; k < kOutcomeCount; ++k) {
        (s.entropy_bits[k] >= s_target_bits ? in : out) += s.probability[k];
    }
    return in + out > 0.0 ? in / (in + out) : 0.0;
}

double threshold_probability(const FusionMatrix &u, double s_target_bits) {
    return threshold_probability(summarize(u.matrix()), s_target_bits);
}

double cost_expectation(const OutcomeSummary &s, double p_target, double alpha, double baseline) {
    double d = s.total_relevant - p_target;
    return baseline + alpha * d * d - expectation_entropy(s);
}

double cost_expectation(const FusionMatrix &u, double p_target, double alpha, double baseline) {
    return cost_expectation(summarize(u.matrix()), p_target, alpha, baseline);
}

double cost_threshold(const OutcomeSummary &s, double s_target_bits, double tau) {
    if (!(tau > 0.0)) {
        throw OutOfRange("smoothing temperature must be positive");
    }
    double acc = 0.0;
    for (int k = 0; k < kOutcomeCount; ++k) {
        acc += s.probability[k] * logistic((s.entropy_bits[k] - s_target_bits) / tau);
    }
    return -acc;
}

double cost_threshold(const FusionMatrix &u, double s_target_bits, double tau) {
    return cost_threshold(summarize(u.matrix()), s_target_bits, tau);
}

int states_used(const OutcomeSummary &s, double s_target_bits) {
    int n = 0;
    for (int k = 0; k < kOutcomeCount; ++k) {
        if (s.relevant[k] && s.probability[k] > kUsedProbability && s.entropy_bits[k] >= s_target_bits - kUsedSlack) {
            ++n;
        }
    }
    return n;
}

void validate_objective(const ObjectiveSpec &obj) {
    if (const auto *e = std::get_if<ExpectationObjective>(&obj)) {
        if (!(e->p_target >= 0.5 && e->p_target <= 1.0)) {
            throw OutOfRange("p_target must lie in [0.5, 1]");
        }
        if (!(e->alpha >= 0.0) || !std::isfinite(e->alpha)) {
            throw OutOfRange("alpha must be a finite non-negative number");
        }
    } else {
        double s = std::get<ThresholdObjective>(obj).s_target_bits;
        if (!(s >= 0.0 && s <= 1.0)) {
            throw OutOfRange("s_target must lie in [0, 1] bits");
        }
    }
}

void OptimizerConfig::validate() const {
    if (restarts < 1 || init_samples < 1 || iterations < 1) {
        throw OutOfRange("restarts, init_samples and iterations must be at least 1");
    }
    if (!(step > 0.0) || !(fd_epsilon > 0.0) || !std::isfinite(step) || !std::isfinite(fd_epsilon)) {
        throw OutOfRange("step and fd_epsilon must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw OutOfRange("momentum must lie in [0, 1)");
    }
    if (anneal_schedule.empty() || alpha_ramp.empty()) {
        throw OutOfRange("anneal schedule and alpha ramp need at least one stage");
    }
    for (double tau : anneal_schedule) {
        if (!(tau > 0.0)) {
            throw OutOfRange("anneal temperatures must be positive");
        }
    }
    for (double a : alpha_ramp) {
        if (!(a > 0.0)) {
            throw OutOfRange("alpha multipliers must be positive");
        }
    }
    if (polish_iterations < 0 || threads < 0) {
        throw OutOfRange("polish_iterations and threads must be non-negative");
    }
}

double OptResult::mean_hard_value() const {
    if (restarts.empty()) {
        return hard_value;
    }
    double acc = 0.0;
    for (const auto &r : restarts) {
        acc += r.hard_value;
    }
    return acc / static_cast<double>(restarts.size());
}

int default_thread_count() {
    if (const char *env = std::getenv("FUSIONLAB_THREADS")) {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(std::min(v, 256L));
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

OptResult optimize(const ObjectiveSpec &obj, const OptimizerConfig &cfg) {
    validate_objective(obj);
    cfg.validate();
    Evaluator ev{obj};
    std::vector<RestartRun> runs(cfg.restarts);
    std::vector<std::uint64_t> seeds(cfg.restarts);
    for (int r = 0; r < cfg.restarts; ++r) {
        seeds[r] = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
    }
    int threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
    parallel_for(cfg.restarts, threads, [&](int r) { runs[r] = run_restart(ev, cfg, seeds[r]); });

    int best = 0;
    for (int r = 1; r < cfg.restarts; ++r) {
        if (runs[r].best.better_than(runs[best].best)) {
            best = r;
        }
    }
    OptResult out;
    out.best_restart = best;
    out.seed = seeds[best];
    out.best_matrix =
        FusionMatrix::validate(runs[best].best.u, kDefaultUnitaryTol, {Provenance::Kind::Derived, "optimized", seeds[best]});
    OutcomeSummary s = summarize(out.best_matrix.matrix());
    const std::vector<double> &stages = ev.threshold() ? cfg.anneal_schedule : cfg.alpha_ramp;
    out.objective_value = ev.smoothed(s, stages.back());
    out.hard_value = ev.hard(s);
    out.p_total = s.total_relevant;
    out.expectation = expectation_entropy(s);
    out.states_used = states_used(s, ev.threshold() ? ev.s_target() : 0.0);
    out.trace = std::move(runs[best].trace);
    for (int r = 0; r < cfg.restarts; ++r) {
        out.restarts.push_back({seeds[r], runs[r].hard, runs[r].best.rank});
    }
    return out;
}

std::vector<SweepRow> sweep(ObjectiveKind kind, const std::vector<double> &targets, const OptimizerConfig &cfg,
                            double alpha) {
    std::vector<SweepRow> rows;
    rows.reserve(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        OptimizerConfig c = cfg;
        c.master_seed = derive_seed(cfg.master_seed, k);
        ObjectiveSpec obj = kind == ObjectiveKind::Expectation ? ObjectiveSpec{ExpectationObjective{targets[k], alpha}}
                                                               : ObjectiveSpec{ThresholdObjective{targets[k]}};
        OptResult r = optimize(obj, c);
        SweepRow row;
        row.target = targets[k];
        row.hard_value = r.hard_value;
        row.mean_hard_value = r.mean_hard_value();
        row.p_total = r.p_total;
        row.states_used = r.states_used;
        row.seed = c.master_seed;
        row.iterations = c.iterations;
        row.matrix = r.best_matrix;
        rows.push_back(std::move(row));
    }
    return rows;
}

void RunningStats::add(double x) {
    ++count;
    double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

double RunningStats::variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

double RunningStats::stddev() const { return std::sqrt(variance()); }

ScatterResult random_scatter(int n, std::uint64_t seed, ObjectiveKind kind, const std::vector<double> &s_targets) {
    if (n < 1) {
        throw OutOfRange("scatter needs at least one sample");
    }
    for (double s : s_targets) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw OutOfRange("s_target must lie in [0, 1] bits");
        }
    }
    if (kind == ObjectiveKind::Threshold && s_targets.empty()) {
        throw OutOfRange("threshold scatter needs at least one s_target");
    }
    ScatterResult out;
    Rng rng(seed);
    if (kind == ObjectiveKind::Expectation) {
        out.summaries.resize(2);
        out.points.reserve(n);
    } else {
        out.summaries.resize(s_targets.size());
        out.points.reserve(static_cast<std::size_t>(n) * s_targets.size());
    }
    for (int k = 0; k < n; ++k) {
        OutcomeSummary s = summarize(haar_sample(rng).matrix());
        if (kind == ObjectiveKind::Expectation) {
            double e = expectation_entropy(s);
            out.points.push_back({s.total_relevant, e});
            out.summaries[0].add(s.total_relevant);
            out.summaries[1].add(e);
        } else {
            for (std::size_t t = 0; t < s_targets.size(); ++t) {
                double p = threshold_probability(s, s_targets[t]);
                out.points.push_back({s_targets[t], p});
                out.summaries[t].add(p);
            }
        }
    }
    return out;
}

}  // namespace fusionlab
