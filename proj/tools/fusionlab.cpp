#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fusionlab/classify.hpp"
#include "fusionlab/entangle.hpp"
#include "fusionlab/errors.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/optimizer.hpp"
#include "fusionlab/oracle.hpp"
#include "fusionlab/verify.hpp"

using namespace fusionlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

EntropyBase base_of(bool nats) { return nats ? EntropyBase::Nats : EntropyBase::Bits; }

std::filesystem::path out_dir(const std::string &out) {
    std::filesystem::path p = out.empty() ? "." : out;
    std::filesystem::create_directories(p);
    return p;
}

void emit_json(const Json &j, const std::string &out) {
    std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out, text);
    }
}

std::vector<double> range_targets(double lo, double hi, double step) {
    std::vector<double> out;
    int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int k = 0; k <= n; ++k) {
        out.push_back(round12(lo + k * step));
    }
    return out;
}

std::string target_tag(double t) {
    std::string s = format_number(t);
    for (char &c : s) {
        if (c == '.') {
            c = 'p';
        }
    }
    return s;
}

NeighborArity parse_arity(const std::string &s) {
    if (s == "one" || s == "1") {
        return NeighborArity::One;
    }
    if (s == "two" || s == "2") {
        return NeighborArity::Two;
    }
    throw UsageError("arity must be one or two");
}

ObjectiveKind parse_kind(const std::string &s) {
    if (s == "expectation") {
        return ObjectiveKind::Expectation;
    }
    if (s == "threshold") {
        return ObjectiveKind::Threshold;
    }
    throw UsageError("objective must be expectation or threshold");
}

// analyze

struct AnalyzeArgs {
    std::string matrix;
    std::string arity = "one";
    double tol = kDefaultClassifyTol;
    bool nats = false;
    std::string out;
};

int cmd_analyze(const AnalyzeArgs &a) {
    FusionMatrix u = resolve_matrix(a.matrix);
    emit_json(analysis_report(u, parse_arity(a.arity), base_of(a.nats), a.tol), a.out);
    return kExitOk;
}

// sample

struct SampleArgs {
    int n = 1000;
    std::uint64_t seed = 0;
    std::string mode = "expectation";
    std::vector<double> s_targets;
    bool nats = false;
    std::string out;
};

int cmd_sample(const SampleArgs &a) {
    if (a.n < 1) {
        throw UsageError("--n must be at least 1");
    }
    ObjectiveKind kind = parse_kind(a.mode);
    std::vector<double> targets = a.s_targets;
    if (kind == ObjectiveKind::Threshold && targets.empty()) {
        targets = range_targets(0.0, 1.0, 0.1);
    }
    ScatterResult r = random_scatter(a.n, a.seed, kind, targets);
    auto dir = out_dir(a.out);
    write_file_atomic(dir / "scatter.csv", scatter_csv(r, kind, base_of(a.nats)));
    std::string summary = scatter_summary_csv(r, kind, targets, base_of(a.nats));
    write_file_atomic(dir / "scatter_summary.csv", summary);
    std::cout << summary;
    return kExitOk;
}

// optimize

struct OptimizeArgs {
    std::string objective;
    std::vector<double> targets;
    bool sweep = false;
    double alpha = 1.0;
    OptimizerConfig cfg;
    bool nats = false;
    std::string out;
};

int cmd_optimize(OptimizeArgs a) {
    ObjectiveKind kind = parse_kind(a.objective);
    if (a.targets.empty()) {
        if (!a.sweep) {
            throw UsageError(kind == ObjectiveKind::Threshold ? "give --s-target or --sweep"
                                                              : "give --p-target or --sweep");
        }
        a.targets = kind == ObjectiveKind::Threshold ? range_targets(0.0, 1.0, 0.1) : range_targets(0.5, 1.0, 0.01);
    }
    for (double t : a.targets) {
        if (kind == ObjectiveKind::Threshold) {
            validate_objective(ThresholdObjective{t});
        } else {
            validate_objective(ExpectationObjective{t, a.alpha});
        }
    }
    a.cfg.validate();
    std::vector<SweepRow> rows = sweep(kind, a.targets, a.cfg, a.alpha);
    auto dir = out_dir(a.out);
    EntropyBase base = base_of(a.nats);
    std::string csv = kind == ObjectiveKind::Threshold ? sweep_threshold_csv(rows, base) : sweep_expectation_csv(rows, base);
    write_file_atomic(dir / (kind == ObjectiveKind::Threshold ? "sweep_threshold.csv" : "sweep_expectation.csv"), csv);
    for (const auto &r : rows) {
        Json j = matrix_to_json(r.matrix);
        j["objective"] = a.objective;
        j["target"] = round12(r.target);
        j["hard_value"] = round12(r.hard_value);
        j["p_total"] = round12(r.p_total);
        j["states_used"] = r.states_used;
        j["seed"] = r.seed;
        write_file_atomic(dir / ("best_" + a.objective + "_" + target_tag(r.target) + ".json"), j.dump(2) + "\n");
    }
    std::cout << csv;
    return kExitOk;
}

// verify

struct VerifyArgs {
    VerifyOptions opts;
    std::string suite;
};

int cmd_verify(const VerifyArgs &a) {
    if (a.opts.trials < 1) {
        throw UsageError("--trials must be at least 1");
    }
    std::vector<SuiteResult> results;
    if (a.suite.empty()) {
        results = run_verification(a.opts);
    } else {
        results.push_back(run_suite(a.suite, a.opts));
    }
    bool ok = true;
    for (const auto &r : results) {
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << "  checks=" << r.checks << " failures=" << r.failures
                  << " time=" << format_number(r.seconds) << "s";
        if (!r.passed() && !r.first_failure.empty()) {
            std::cout << "  first: " << r.first_failure;
        }
        std::cout << '\n';
        ok = ok && r.passed();
    }
    std::cout << (ok ? "all suites passed" : "verification FAILED") << '\n';
    return ok ? kExitOk : kExitVerifyFailed;
}

// oracle

struct OracleArgs {
    std::string left;
    std::string right;
    int left_mark = -1;
    int right_mark = 0;
    std::string clusters;
    std::string matrix = "pbs2";
    double tol = 1e-9;
    std::string out;
};

GraphSpec read_graph(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot read graph file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph_spec(ss.str());
}

FusionScenario scenario_from(const OracleArgs &a) {
    if (!a.clusters.empty()) {
        auto plus = a.clusters.find('+');
        if (plus == std::string::npos) {
            throw UsageError("--clusters expects L+R, e.g. 3+3");
        }
        int l = 0, r = 0;
        try {
            l = std::stoi(a.clusters.substr(0, plus));
            r = std::stoi(a.clusters.substr(plus + 1));
        } catch (const std::exception &) {
            throw UsageError("--clusters expects L+R, e.g. 3+3");
        }
        if (l < 2 || r < 2) {
            throw UsageError("each cluster needs at least two vertices");
        }
        return FusionScenario::linear(l, r);
    }
    if (a.left.empty() || a.right.empty()) {
        throw UsageError("give --clusters or both --left and --right");
    }
    FusionScenario sc;
    sc.left = read_graph(a.left);
    sc.right = read_graph(a.right);
    sc.left_marked = a.left_mark < 0 ? sc.left.n - 1 : a.left_mark;
    sc.right_marked = a.right_mark;
    return sc;
}

int cmd_oracle(const OracleArgs &a) {
    FusionScenario sc = scenario_from(a);
    sc.validate();
    FusionMatrix u = resolve_matrix(a.matrix);
    NeighborArity arity = sc.arity();
    FusedLayout lay = fused_layout(sc);
    FusionInput in = prepare_fusion_input(sc);
    bool all_ok = true;
    Json outcomes = Json::array();
    for (const auto &o : outcome_table(u).entries) {
        Json e;
        e["i"] = o.i.value();
        e["j"] = o.j.value();
        e["probability"] = round12(o.probability);
        e["relevant"] = o.relevant;
        if (o.zero_probability) {
            e["skipped"] = "zero probability";
            outcomes.push_back(std::move(e));
            continue;
        }
        Projection p = apply_fusion_projector(in.state, in.a, in.b, o.raw());
        double expected_weight = o.relevant ? o.probability : o.probability / 2;
        bool weight_ok = std::abs(p.weight - expected_weight) <= a.tol;
        e["projector_weight"] = round12(p.weight);
        e["expected_weight"] = round12(expected_weight);
        e["weight_pass"] = weight_ok;
        bool ok = weight_ok;
        if (o.relevant) {
            double cut = bipartite_entropy(p.state, lay.left_qubits).bits;
            double formula = outcome_entropy(o).bits;
            bool ent_ok = std::abs(cut - formula) <= a.tol;
            bool state_ok = equal_up_to_phase(p.state, expected_fused_state(sc, o.state), kStateTol);
            e["cut_entropy_bits"] = round12(cut);
            e["formula_entropy_bits"] = round12(formula);
            e["entropy_pass"] = ent_ok;
            e["state_pass"] = state_ok;
            ok = ok && ent_ok && state_ok;

            StateClass cls = classify(o, arity);
            e["classification"] = classification_to_json(cls);
            if (cls.stabilizer) {
                bool te = check_Te_stabilizer(p.state, sc, cls.stabilizer->phi, kStateTol);
                e["stabilizer_pass"] = te;
                ok = ok && te;
            }
            if (cls.weighted_graph && arity == NeighborArity::One) {
                bool wg = check_weighted_graph_equivalence(p.state, sc, fit_edge_gate(o.state), kStateTol);
                e["weighted_graph_pass"] = wg;
                ok = ok && wg;
            }
        }
        e["pass"] = ok;
        all_ok = all_ok && ok;
        outcomes.push_back(std::move(e));
    }
    Json report;
    report["source"] = u.provenance().describe();
    report["left"] = format_graph_spec(sc.left);
    report["left_marked"] = sc.left_marked;
    report["right"] = format_graph_spec(sc.right);
    report["right_marked"] = sc.right_marked;
    report["arity"] = arity == NeighborArity::One ? "one" : "two";
    report["qubits"] = sc.input_qubits();
    report["tolerance"] = a.tol;
    report["outcomes"] = std::move(outcomes);
    report["pass"] = all_ok;
    emit_json(report, a.out);
    if (!a.out.empty() && a.out != "-") {
        std::cout << (all_ok ? "oracle comparisons passed" : "oracle comparisons FAILED") << '\n';
    }
    return all_ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulator, classifier and optimizer for generalized type-II fusion"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto *analyze = app.add_subcommand("analyze", "Outcome table, entanglement and classification for one matrix");
    analyze->add_option("--matrix", an.matrix, "Builtin name or JSON matrix file")->required();
    analyze->add_option("--arity", an.arity, "Size of n(b): one or two")->capture_default_str();
    analyze->add_option("--tol", an.tol, "Classification tolerance")->capture_default_str();
    analyze->add_flag("--nats", an.nats, "Report entropies in nats");
    analyze->add_option("--out", an.out, "Output JSON file (stdout if omitted)");

    SampleArgs sa;
    auto *sample = app.add_subcommand("sample", "Haar scatter of (p_total, <S>) or (s_target, P)");
    sample->add_option("--n", sa.n, "Number of Haar samples")->capture_default_str();
    sample->add_option("--seed", sa.seed, "Seed")->capture_default_str();
    sample->add_option("--mode", sa.mode, "expectation or threshold")->capture_default_str();
    sample->add_option("--s-targets", sa.s_targets, "Threshold targets in bits")->delimiter(',');
    sample->add_flag("--nats", sa.nats, "Scale entropies by ln 2");
    sample->add_option("--out", sa.out, "Output directory");

    OptimizeArgs oa;
    double s_target = NAN;
    double p_target = NAN;
    auto *opt = app.add_subcommand("optimize", "Optimize one target or sweep");
    opt->add_option("objective", oa.objective, "expectation or threshold")->required();
    auto *st = opt->add_option("--s-target", s_target, "Threshold target in bits");
    auto *pt = opt->add_option("--p-target", p_target, "Total relevant probability target");
    opt->add_option("--targets", oa.targets, "Comma-separated targets")->delimiter(',');
    opt->add_flag("--sweep", oa.sweep, "Default grid of targets");
    opt->add_option("--alpha", oa.alpha, "Penalty weight")->capture_default_str();
    opt->add_option("--restarts", oa.cfg.restarts, "Restarts")->capture_default_str();
    opt->add_option("--iterations", oa.cfg.iterations, "Descent steps per restart")->capture_default_str();
    opt->add_option("--step", oa.cfg.step, "Learning rate")->capture_default_str();
    opt->add_option("--init-samples", oa.cfg.init_samples, "Haar draws before descent")->capture_default_str();
    opt->add_option("--seed", oa.cfg.master_seed, "Master seed")->capture_default_str();
    opt->add_option("--threads", oa.cfg.threads, "Worker threads (0: FUSIONLAB_THREADS or hardware)");
    opt->add_flag("--nats", oa.nats, "Scale entropies by ln 2");
    opt->add_option("--out", oa.out, "Output directory");
    st->excludes(pt);

    VerifyArgs va;
    auto *verify = app.add_subcommand("verify", "Run the invariant suites");
    verify->add_option("--trials", va.opts.trials, "Random trials per suite")->capture_default_str();
    verify->add_option("--seed", va.opts.seed, "Seed")->capture_default_str();
    verify->add_option("--tol", va.opts.tol, "Oracle tolerance")->capture_default_str();
    verify->add_option("--suite", va.suite, "Run one suite only");
    verify->add_flag("--inject-fault", va.opts.inject_fault, "Corrupt the sum-rule fixture");

    OracleArgs ora;
    auto *oracle = app.add_subcommand("oracle", "State-vector fusion of two graph states against the closed forms");
    oracle->add_option("--left", ora.left, "Left graph file");
    oracle->add_option("--right", ora.right, "Right graph file");
    oracle->add_option("--left-mark", ora.left_mark, "Fused vertex of the left graph (default: last)");
    oracle->add_option("--right-mark", ora.right_mark, "Fused vertex of the right graph")->capture_default_str();
    oracle->add_option("--clusters", ora.clusters, "Linear clusters L+R instead of files");
    oracle->add_option("--matrix", ora.matrix, "Builtin name or JSON matrix file")->capture_default_str();
    oracle->add_option("--tol", ora.tol, "Comparison tolerance")->capture_default_str();
    oracle->add_option("--out", ora.out, "Output JSON file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            return cmd_analyze(an);
        }
        if (sample->parsed()) {
            return cmd_sample(sa);
        }
        if (opt->parsed()) {
            if (!std::isnan(s_target)) {
                oa.targets.push_back(s_target);
            }
            if (!std::isnan(p_target)) {
                oa.targets.push_back(p_target);
            }
            return cmd_optimize(oa);
        }
        if (verify->parsed()) {
            return cmd_verify(va);
        }
        if (oracle->parsed()) {
            return cmd_oracle(ora);
        }
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotUnitary &e) {
        std::cerr << "NotUnitary: " << e.what() << '\n';
        return kExitUsage;
    } catch (const TooManyQubits &e) {
        std::cerr << "TooManyQubits: " << e.what() << '\n';
        return kExitUsage;
    } catch (const OutOfRange &e) {
        std::cerr << "OutOfRange: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError &e) {
        std::cerr << "ParseError: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MalformedInput &e) {
        std::cerr << "MalformedInput: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FusionError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "IO error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
