#include "fusionlab/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "fusionlab/classify.hpp"
#include "fusionlab/entangle.hpp"
#include "fusionlab/errors.hpp"
#include "fusionlab/fusion.hpp"
#include "fusionlab/optimizer.hpp"
#include "fusionlab/oracle.hpp"

namespace fusionlab {

namespace {

constexpr double kPi = std::numbers::pi;

class Recorder {
  public:
    explicit Recorder(SuiteResult &r) : r_(r) {}

    void check(bool ok, const std::function<std::string()> &what) {
        ++r_.checks;
        if (!ok) {
            if (r_.failures == 0) {
                r_.first_failure = what();
            }
            ++r_.failures;
        }
    }

    void near(double got, double want, double tol, const std::string &label) {
        check(std::abs(got - want) <= tol, [&] {
            std::ostringstream s;
            s.precision(17);
            s << label << ": got " << got << ", expected " << want << " (tol " << tol << ")";
            return s.str();
        });
    }

    void at_most(double got, double bound, const std::string &label) {
        check(got <= bound, [&] {
            std::ostringstream s;
            s.precision(17);
            s << label << ": " << got << " exceeds " << bound;
            return s.str();
        });
    }

  private:
    SuiteResult &r_;
};

using SuiteFn = void (*)(Recorder &, Rng &, const VerifyOptions &);

void sum_rules(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (int trial = 0; trial < opts.trials; ++trial) {
        DerivedInvariants inv = derive_invariants(haar_sample(rng));
        if (opts.inject_fault) {
            inv.n[0] = -inv.n[0];
        }
        double sm = 0.0, sn = 0.0, sk = 0.0;
        Complex st = 0.0;
        for (int i = 0; i < 4; ++i) {
            sm += inv.m[i];
            sn += inv.n[i];
            st += inv.t[i];
            sk += inv.k[i];
            rec.check(inv.m[i] >= -1e-12 && inv.m[i] <= 1 + 1e-12, [] { return std::string("m_i outside [0, 1]"); });
            rec.at_most(std::abs(inv.n[i]), 0.5 + 1e-12, "|n_i|");
            rec.at_most(std::abs(inv.t[i]), inv.m[i] / 2 + 1e-12, "|t_i| against m_i/2");
            rec.at_most(std::abs(inv.k[i]), inv.m[i] + 1e-12, "|k_i| against m_i");
            rec.near(inv.m[i] * inv.m[i], 4 * std::norm(inv.t[i]) + inv.k[i] * inv.k[i], 1e-12, "m^2 = 4|t|^2 + k^2");
        }
        rec.near(sm, 2.0, 1e-12, "sum m");
        rec.near(sn, 0.0, 1e-12, "sum n");
        rec.near(std::abs(st), 0.0, 1e-12, "|sum t|");
        rec.near(sk, 0.0, 1e-12, "sum k");
    }
}

void probability_total(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (int trial = 0; trial < opts.trials; ++trial) {
        FusionMatrix u = haar_sample(rng);
        OutcomeTable t = outcome_table(u);
        rec.near(t.total_probability(), 1.0, 1e-12, "sum p");
        double same = 0.0;
        for (int i = 1; i <= 4; ++i) {
            same += t.at(i, i).probability;
        }
        double rel = total_relevant_probability(u);
        rec.near(rel, 1.0 - same, 1e-12, "p_total against 1 - sum p_ii");
        rec.check(rel >= 0.5 - 1e-12 && rel <= 1.0 + 1e-12, [] { return std::string("p_total outside [1/2, 1]"); });
    }
}

void probability_bounds(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (int trial = 0; trial < opts.trials; ++trial) {
        FusionMatrix u = haar_sample(rng);
        for (const auto &o : outcome_table(u).entries) {
            rec.check(o.probability >= 0.0, [] { return std::string("negative probability"); });
            rec.at_most(o.probability, (o.relevant ? 0.25 : 0.125) + 1e-12, "outcome probability");
            if (o.relevant) {
                rec.near(o.norm * o.norm / 4.0, o.probability, 1e-12, "p = N^2 / 4");
            }
            if (!o.zero_probability) {
                rec.near(o.state.norm_squared(), 1.0, 1e-12, "normalized coefficients");
            }
        }
    }
}

void phase_invariance(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int trial = 0; trial < opts.trials; ++trial) {
        FusionMatrix u = haar_sample(rng);
        std::array<double, 4> l{}, r{};
        for (int k = 0; k < 4; ++k) {
            l[k] = ang(rng);
            r[k] = ang(rng);
        }
        OutcomeTable x = outcome_table(u);
        OutcomeTable y = outcome_table(phase_multiply(u, l, r));
        for (int k = 0; k < kOutcomeCount; ++k) {
            const auto &a = x.entries[k];
            const auto &b = y.entries[k];
            rec.near(a.probability, b.probability, 1e-12, "probability under phases");
            StateCoefficients ra = a.raw(), rb = b.raw();
            rec.near(std::abs(ra.a), std::abs(rb.a), 1e-12, "|A| under phases");
            rec.near(std::abs(ra.b), std::abs(rb.b), 1e-12, "|B| under phases");
            rec.near(std::abs(ra.c), std::abs(rb.c), 1e-12, "|C| under phases");
            rec.near(std::abs(ra.d), std::abs(rb.d), 1e-12, "|D| under phases");
            if (!a.zero_probability && !b.zero_probability) {
                rec.near(outcome_entropy(a).bits, outcome_entropy(b).bits, 1e-9, "entropy under phases");
            }
        }
    }
}

void determinant_dual_form(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (int trial = 0; trial < opts.trials; ++trial) {
        FusionMatrix u = haar_sample(rng);
        for (const auto &o : outcome_table(u).entries) {
            if (!o.relevant || o.probability <= 1e-6) {
                continue;
            }
            double d = determinant(o);
            rec.near(factored_determinant(u, o.i, o.j), d, 1e-12, "factored determinant");
            rec.check(d >= -1e-12 && d <= 0.25 + 1e-12, [] { return std::string("det outside [0, 1/4]"); });
        }
    }
}

void max_entangled_conditions(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    auto check_matrix = [&](const FusionMatrix &u) {
        for (const auto &o : outcome_table(u).entries) {
            if (!o.relevant || o.probability <= 1e-6) {
                continue;
            }
            bool conditions = is_maximally_entangled(u, o.i, o.j, 1e-8);
            bool quarter = std::abs(determinant(o) - 0.25) <= 1e-7;
            rec.check(conditions == quarter, [&] {
                std::ostringstream s;
                s << "maximal-entanglement conditions disagree with det = 1/4 at (" << o.i.value() << ','
                  << o.j.value() << ')';
                return s.str();
            });
        }
    };
    check_matrix(builtin_matrix("pbs2"));
    check_matrix(builtin_matrix("theorem7"));
    for (int trial = 0; trial < opts.trials; ++trial) {
        check_matrix(haar_sample(rng));
    }
}

void haar_moments(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    const int samples = std::max(opts.trials, 2000);
    std::array<RunningStats, 16> second{}, fourth{}, re{}, im{};
    for (int trial = 0; trial < samples; ++trial) {
        FusionMatrix u = haar_sample(rng);
        rec.near(unitarity_deviation(u.matrix()), 0.0, 1e-12, "unitarity of sample");
        for (int e = 0; e < 16; ++e) {
            Complex z = u(e / 4, e % 4);
            double x = std::norm(z);
            second[e].add(x);
            fourth[e].add(x * x);
            re[e].add(z.real());
            im[e].add(z.imag());
        }
    }
    // |U_ij|^2 ~ Beta(1, 3) for Haar U(4).
    const double n = samples;
    const double sd2 = std::sqrt((0.1 - 0.0625) / n);
    const double sd4 = std::sqrt((24.0 * 6.0 / 5040.0 - 0.01) / n);
    const double sd1 = std::sqrt(0.125 / n);
    for (int e = 0; e < 16; ++e) {
        rec.near(second[e].mean, 0.25, 5 * sd2, "E|U_ij|^2");
        rec.near(fourth[e].mean, 0.1, 5 * sd4, "E|U_ij|^4");
        rec.near(re[e].mean, 0.0, 5 * sd1, "E Re U_ij");
        rec.near(im[e].mean, 0.0, 5 * sd1, "E Im U_ij");
    }
}

void half_bound(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (const char *name : {"pbs2", "theorem7"}) {
        rec.near(threshold_probability(builtin_matrix(name), 1.0), 0.5, 1e-12, std::string("P(1) for ") + name);
    }
    for (int trial = 0; trial < opts.trials; ++trial) {
        OutcomeSummary s = summarize(haar_sample(rng).matrix());
        rec.at_most(threshold_probability(s, 1.0), 0.5 + 1e-9, "P(1)");
        rec.near(threshold_probability(s, 0.0), 1.0, 0.0, "P(0)");
        rec.at_most(expectation_entropy(s), s.total_relevant + 1e-12, "<S> against p_total");
    }
}

void unit_success_product(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    FusionMatrix base = builtin_matrix("blockpair");
    int count = std::max(1, std::min(opts.trials, 200));
    for (int trial = 0; trial <= count; ++trial) {
        FusionMatrix u = base;
        if (trial > 0) {
            std::array<double, 4> l{}, r{};
            for (int k = 0; k < 4; ++k) {
                l[k] = ang(rng);
                r[k] = ang(rng);
            }
            u = phase_multiply(base, l, r);
        }
        OutcomeSummary s = summarize(u.matrix());
        rec.near(s.total_relevant, 1.0, 1e-9, "p_total of blockpair family");
        for (int k = 0; k < kOutcomeCount; ++k) {
            if (s.relevant[k] && s.probability[k] > 1e-9) {
                rec.at_most(s.entropy_bits[k], 1e-9, "entropy at p_total = 1");
            }
        }
    }
}

void bosonic_equivalence(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    for (const auto &name : builtin_names()) {
        FusionMatrix u = builtin_matrix(name);
        rec.at_most(compare_tables(bosonic_outcome_table(u), outcome_table(u)).worst(), opts.tol, "bosonic " + name);
    }
    for (int trial = 0; trial < opts.trials; ++trial) {
        FusionMatrix u = haar_sample(rng);
        rec.at_most(compare_tables(bosonic_outcome_table(u), outcome_table(u)).worst(), opts.tol,
                    "bosonic against closed form");
    }
}

void weighted_graph_coherence(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int trial = 0; trial < opts.trials; ++trial) {
        WeightedGraphParams p{ang(rng), ang(rng), ang(rng), 0.0, 0.0};
        p.phi2 = trial % 3 == 0 ? p.phi1 + (trial % 2) * kPi : ang(rng);
        StateCoefficients s = reconstruct(p);
        auto w = is_weighted_graph(s);
        rec.check(w.has_value(), [] { return std::string("weighted-graph form not recognised"); });
        if (!w) {
            continue;
        }
        rec.near(determinant(s), (1 - std::cos(w->chi)) / 8, opts.tol, "det = (1 - cos chi) / 8");
        bool maximal = std::abs(wrap_pi(w->chi - kPi)) <= 1e-8;
        bool cluster = is_cluster_up_to_rotation(s, 1e-8).has_value();
        rec.check(maximal == cluster, [&] {
            std::ostringstream s2;
            s2.precision(17);
            s2 << "det = 1/4 and cluster classification disagree at chi = " << w->chi;
            return s2.str();
        });
    }
}

void stabilizer_oracle(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::normal_distribution<double> gauss;
    const int count = std::max(1, std::min(opts.trials, 100));
    const double h = 1.0 / std::sqrt(2.0);
    for (int trial = 0; trial < count; ++trial) {
        FusionScenario sc = random_scenario(rng, 4);
        double theta = ang(rng);
        double phi = ang(rng);
        StateCoefficients c = trial % 2 == 0
                                  ? StateCoefficients{std::polar(h, theta), 0.0, 0.0, std::polar(h, theta + phi)}
                                  : StateCoefficients{0.0, std::polar(h, theta), std::polar(h, theta + phi), 0.0};
        auto st = is_stabilizer(c);
        rec.check(st.has_value(), [] { return std::string("stabilizer coefficients not recognised"); });
        if (st) {
            rec.check(check_Te_stabilizer(fuse(sc, c).state, sc, st->phi, kStateTol),
                      [] { return std::string("T_e stabilizer fails for stabilizer coefficients"); });
        }
    }
    for (int trial = 0; trial < count; ++trial) {
        FusionScenario sc = random_scenario(rng, 4);
        StateCoefficients c{{gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)},
                            {gauss(rng), gauss(rng)}};
        c = c.normalized();
        if (is_stabilizer(c)) {
            continue;
        }
        StateVector s = fuse(sc, c).state;
        int passing = 0;
        for (int k = 0; k < 360; ++k) {
            passing += check_Te_stabilizer(s, sc, 2 * kPi * k / 360 - kPi, kStateTol);
        }
        rec.check(passing == 0, [] { return std::string("T_e stabilizer holds for non-stabilizer coefficients"); });
    }
}

void fusion_oracle(Recorder &rec, Rng &rng, const VerifyOptions &opts) {
    const int count = std::max(1, std::min(opts.trials, 50));
    for (int trial = 0; trial < count; ++trial) {
        FusionScenario sc = random_scenario(rng, 4);
        FusionMatrix u = haar_sample(rng);
        FusedLayout lay = fused_layout(sc);
        FusionInput in = prepare_fusion_input(sc);
        for (const auto &o : outcome_table(u).entries) {
            if (o.probability <= 1e-6) {
                continue;
            }
            Projection p = apply_fusion_projector(in.state, in.a, in.b, o.raw());
            if (!o.relevant) {
                rec.near(p.weight, o.probability / 2, opts.tol, "non-relevant projector weight");
                continue;
            }
            rec.near(p.weight, o.probability, opts.tol, "projector weight");
            rec.near(bipartite_entropy(p.state, lay.left_qubits).bits, outcome_entropy(o).bits, opts.tol,
                     "cut entropy");
            rec.check(equal_up_to_phase(p.state, expected_fused_state(sc, o.state), kStateTol),
                      [] { return std::string("fused state differs from the assembled form"); });
        }
    }
}

struct SuiteEntry {
    const char *name;
    SuiteFn fn;
};

constexpr SuiteEntry kSuites[] = {
    {"sum_rules", sum_rules},
    {"probability_total", probability_total},
    {"probability_bounds", probability_bounds},
    {"phase_invariance", phase_invariance},
    {"determinant_dual_form", determinant_dual_form},
    {"max_entangled_conditions", max_entangled_conditions},
    {"haar_moments", haar_moments},
    {"half_bound", half_bound},
    {"unit_success_product", unit_success_product},
    {"bosonic_equivalence", bosonic_equivalence},
    {"weighted_graph_coherence", weighted_graph_coherence},
    {"stabilizer_oracle", stabilizer_oracle},
    {"fusion_oracle", fusion_oracle},
};

SuiteResult run_entry(std::size_t index, const VerifyOptions &opts) {
    if (opts.trials < 1) {
        throw OutOfRange("trials must be at least 1");
    }
    SuiteResult out;
    out.name = kSuites[index].name;
    Recorder rec(out);
    Rng rng(derive_seed(opts.seed, index));
    auto t0 = std::chrono::steady_clock::now();
    try {
        kSuites[index].fn(rec, rng, opts);
    } catch (const std::exception &e) {
        rec.check(false, [&] { return std::string("exception: ") + e.what(); });
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
    std::vector<std::string> out;
    for (const auto &s : kSuites) {
        out.emplace_back(s.name);
    }
    return out;
}

std::vector<SuiteResult> run_verification(const VerifyOptions &opts) {
    std::vector<SuiteResult> out;
    for (std::size_t k = 0; k < std::size(kSuites); ++k) {
        out.push_back(run_entry(k, opts));
    }
    return out;
}

SuiteResult run_suite(const std::string &name, const VerifyOptions &opts) {
    for (std::size_t k = 0; k < std::size(kSuites); ++k) {
        if (name == kSuites[k].name) {
            return run_entry(k, opts);
        }
    }
    throw OutOfRange("unknown suite: " + name);
}

}  // namespace fusionlab
