// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fusionlab/io.hpp"
#include "fusionlab/optimizer.hpp"
#include "fusionlab/oracle.hpp"
#include "fusionlab/verify.hpp"

#ifndef FUSIONLAB_CLI_PATH
#error "FUSIONLAB_CLI_PATH must point at the fusionlab executable"
#endif

using namespace fusionlab;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = true;
    std::ostringstream notes;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            notes << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

int run_cli(const std::string &args, const std::string &stdout_file) {
    std::string cmd = std::string(FUSIONLAB_CLI_PATH) + " " + args + " > " + stdout_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double max_abs_n(const FusionMatrix &u) {
    double out = 0.0;
    for (double n : derive_invariants(u).n) {
        out = std::max(out, std::abs(n));
    }
    return out;
}

bool report(int id, const std::string &title, const std::function<void(Verdict &)> &body, double limit_s) {
    Verdict v;
    auto t0 = Clock::now();
    try {
        body(v);
    } catch (const std::exception &e) {
        v.require(false, std::string("exception: ") + e.what());
    }
    double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    v.require(dt < limit_s, "runtime " + fmt(dt) + " s over " + fmt(limit_s) + " s");
    std::cout << "CRITERION " << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << title << "  (" << fmt(dt) << " s)"
              << v.notes.str() << std::endl;
    return v.pass;
}

void criterion1(Verdict &v, const std::filesystem::path &dir) {
    auto out = dir / "pbs2.json";
    int rc = run_cli("analyze --matrix pbs2 --out " + out.string(), (dir / "c1.log").string());
    v.require(rc == 0, "analyze exit code " + std::to_string(rc));
    Json r = Json::parse(slurp(out));
    double same = 0.0;
    for (const auto &o : r["outcomes"]) {
        int i = o["i"], j = o["j"];
        double p = o["probability"];
        double s = o["entanglement"]["entropy"];
        if (i == j) {
            same += p;
            v.require(s <= 1e-9, "same-port outcome not a product");
            auto labels = o["classification"]["labels"];
            v.require(std::find(labels.begin(), labels.end(), "Product") != labels.end(), "same-port label");
        } else if ((i == 1 && j == 2) || (i == 3 && j == 4)) {
            v.require(std::abs(p) <= 1e-9, "zero outcome (" + std::to_string(i) + "," + std::to_string(j) + ")");
        } else {
            v.require(std::abs(p - 0.125) <= 1e-9, "p of cross-port outcome");
            v.require(std::abs(s - 1.0) <= 1e-9, "S of cross-port outcome");
        }
    }
    v.require(std::abs(same - 0.5) <= 1e-9, "same-port total " + fmt(same));
    v.notes << " same-port total " << fmt(same);
}

void criterion2(Verdict &v) {
    Rng rng(20260101);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        worst = std::max(worst, threshold_probability(summarize(haar_sample(rng).matrix()), 1.0));
    }
    v.require(worst <= 0.5 + 1e-9, "max P(1) = " + fmt(worst));
    v.notes << " max P(1) over 1e5 samples = " << fmt(worst);
}

void criterion3(Verdict &v) {
    for (const char *name : {"pbs2", "theorem7"}) {
        FusionMatrix u = builtin_matrix(name);
        double p = threshold_probability(u, 1.0);
        v.require(std::abs(p - 0.5) <= 1e-12, std::string(name) + " P(1) = " + fmt(p));
        v.require(max_abs_n(u) <= 1e-12, std::string(name) + " n != 0");
    }
    OptResult r = optimize(ThresholdObjective{1.0}, OptimizerConfig{});
    double n = max_abs_n(r.best_matrix);
    v.require(r.hard_value >= 0.499, "optimized P(1) = " + fmt(r.hard_value));
    v.require(r.hard_value <= 0.5 + 1e-9, "optimized P(1) above bound");
    v.require(n <= 1e-3, "max |n_i| = " + fmt(n));
    v.notes << " optimized P(1) = " << fmt(r.hard_value) << ", max|n_i| = " << fmt(n);
}

void criterion4(Verdict &v) {
    OutcomeSummary s = summarize(builtin_matrix("blockpair").matrix());
    v.require(std::abs(s.total_relevant - 1.0) <= 1e-9, "blockpair p_total");
    double worst = 0.0;
    for (int k = 0; k < kOutcomeCount; ++k) {
        if (s.relevant[k] && s.probability[k] > 1e-9) {
            worst = std::max(worst, s.entropy_bits[k]);
        }
    }
    v.require(worst <= 1e-9, "blockpair max S = " + fmt(worst));
    OptimizerConfig cfg;
    OptResult r = optimize(ThresholdObjective{0.1}, cfg);
    double top = r.hard_value;
    for (const auto &x : r.restarts) {
        top = std::max(top, x.hard_value);
    }
    v.require(r.restarts.size() == 20, "restart count");
    v.require(top < 1.0 - 1e-6, "P(0.1) reached " + fmt(top));
    v.notes << " blockpair max S = " << fmt(worst) << ", best P(0.1) over 20 restarts = " << fmt(top);
}

void criterion5(Verdict &v, const std::filesystem::path &dir) {
    std::vector<double> targets;
    for (int k = 0; k <= 50; ++k) {
        targets.push_back(round12(0.5 + 0.01 * k));
    }
    std::vector<SweepRow> rows = sweep(ObjectiveKind::Expectation, targets, OptimizerConfig{});
    write_file_atomic(dir / "sweep_expectation.csv", sweep_expectation_csv(rows));
    v.require(rows.front().hard_value >= 0.49, "<S>(0.5) = " + fmt(rows.front().hard_value));
    v.require(rows.back().hard_value <= 0.01, "<S>(1.0) = " + fmt(rows.back().hard_value));
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        worst_rise = std::max(worst_rise, rows[k].hard_value - rows[k - 1].hard_value);
    }
    v.require(worst_rise <= 0.02, "sweep rises by " + fmt(worst_rise));
    double worst_band = 0.0;
    for (const auto &r : rows) {
        for (double p : {0.6, 0.7, 0.8, 0.9}) {
            if (std::abs(r.target - p) < 1e-9) {
                worst_band = std::max(worst_band, std::abs(r.hard_value - (1.0 - p)));
            }
        }
    }
    v.require(worst_band <= 0.08, "soft band deviation " + fmt(worst_band));
    v.notes << " <S>(0.5) = " << fmt(rows.front().hard_value) << ", <S>(1) = " << fmt(rows.back().hard_value)
            << ", max rise " << fmt(worst_rise) << ", soft band max |<S> - (1-p)| = " << fmt(worst_band);
}

void criterion6(Verdict &v, const std::filesystem::path &dir) {
    std::vector<double> targets;
    for (int k = 0; k <= 10; ++k) {
        targets.push_back(round12(0.1 * k));
    }
    std::vector<SweepRow> rows = sweep(ObjectiveKind::Threshold, targets, OptimizerConfig{});
    write_file_atomic(dir / "sweep_threshold.csv", sweep_threshold_csv(rows));
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        worst_rise = std::max(worst_rise, rows[k].hard_value - rows[k - 1].hard_value);
    }
    v.require(worst_rise <= 1e-3, "P rises by " + fmt(worst_rise));
    v.require(rows.front().hard_value == 1.0, "P(0) = " + fmt(rows.front().hard_value));
    double p1 = rows.back().hard_value;
    v.require(p1 >= 0.499 && p1 <= 0.5 + 1e-9, "P(1) = " + fmt(p1));
    int interior = 0;
    int six = 0;
    for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
        ++interior;
        six += rows[k].states_used == 6;
    }
    v.require(six >= 0.8 * interior, "states_used = 6 at " + std::to_string(six) + "/" + std::to_string(interior));
    v.notes << " P(0) = " << fmt(rows.front().hard_value) << ", P(1) = " << fmt(p1) << ", max rise " << fmt(worst_rise)
            << ", soft states_used = 6 at " << six << "/" << interior << " interior points";
}

void criterion7(Verdict &v) {
    Rng rng(777);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        FusionMatrix u = haar_sample(rng);
        worst = std::max(worst, compare_tables(bosonic_outcome_table(u), outcome_table(u)).worst());
    }
    v.require(worst <= 1e-9, "bosonic deviation " + fmt(worst));
    double worst_w = 0.0;
    double worst_s = 0.0;
    for (int k = 0; k < 50; ++k) {
        FusionScenario sc = random_scenario(rng, 4);
        FusionMatrix u = haar_sample(rng);
        FusedLayout lay = fused_layout(sc);
        FusionInput in = prepare_fusion_input(sc);
        for (const auto &o : outcome_table(u).entries) {
            if (!o.relevant || o.zero_probability) {
                continue;
            }
            Projection p = apply_fusion_projector(in.state, in.a, in.b, o.raw());
            worst_w = std::max(worst_w, std::abs(p.weight - o.probability));
            worst_s = std::max(worst_s, std::abs(bipartite_entropy(p.state, lay.left_qubits).bits - outcome_entropy(o).bits));
        }
    }
    v.require(worst_w <= 1e-9, "weight deviation " + fmt(worst_w));
    v.require(worst_s <= 1e-9, "cut entropy deviation " + fmt(worst_s));
    v.notes << " table " << fmt(worst) << ", weight " << fmt(worst_w) << ", entropy " << fmt(worst_s);
}

void suite_criterion(Verdict &v, const std::string &suite, int trials) {
    VerifyOptions opts;
    opts.trials = trials;
    opts.seed = 4;
    SuiteResult r = run_suite(suite, opts);
    v.require(r.passed(), r.first_failure.empty() ? suite : r.first_failure);
    v.notes << " " << r.checks << " checks, " << r.failures << " failures";
}

void criterion10(Verdict &v, const std::filesystem::path &dir) {
    auto log = dir / "verify.log";
    int rc = run_cli("verify --trials 1000 --seed 1", log.string());
    v.require(rc == 0, "verify exit code " + std::to_string(rc));
    std::string text = slurp(log);
    v.require(text.find("FAIL") == std::string::npos, "a suite failed");
    int suites = 0;
    for (std::size_t pos = 0; (pos = text.find("PASS ", pos)) != std::string::npos; ++pos) {
        ++suites;
    }
    v.require(suites == static_cast<int>(verify_suite_names().size()), "suite count " + std::to_string(suites));
    v.notes << " " << suites << " suites passed";
}

}  // namespace

int main(int argc, char **argv) {
    std::filesystem::path dir = argc > 1 ? argv[1] : "acceptance_out";
    int only = argc > 2 ? std::atoi(argv[2]) : 0;
    std::filesystem::create_directories(dir);
    struct Entry {
        int id;
        const char *title;
        std::function<void(Verdict &)> body;
        double limit_s;
    };
    const std::vector<Entry> entries{
        {1, "PBS2 reproduction", [&](Verdict &v) { criterion1(v, dir); }, 1.0},
        {2, "threshold bound over Haar samples", criterion2, 60.0},
        {3, "saturation at s = 1", criterion3, 120.0},
        {4, "unit success probability gives product states", criterion4, 120.0},
        {5, "expectation sweep", [&](Verdict &v) { criterion5(v, dir); }, 900.0},
        {6, "threshold sweep shape", [&](Verdict &v) { criterion6(v, dir); }, 900.0},
        {7, "oracle equivalence", criterion7, 300.0},
        {8, "classification coherence", [](Verdict &v) { suite_criterion(v, "weighted_graph_coherence", 10000); }, 60.0},
        {9, "stabilizer oracle", [](Verdict &v) { suite_criterion(v, "stabilizer_oracle", 100); }, 120.0},
        {10, "verify --trials 1000", [&](Verdict &v) { criterion10(v, dir); }, 120.0},
    };
    int failed = 0;
    int ran = 0;
    for (const auto &e : entries) {
        if (only == 0 || only == e.id) {
            ++ran;
            failed += !report(e.id, e.title, e.body, e.limit_s);
        }
    }
    if (ran == 0) {
        std::cerr << "no criterion " << only << std::endl;
        return 2;
    }
    std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << std::endl;
    return failed == 0 ? 0 : 1;
}
