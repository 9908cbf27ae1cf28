#include "fusionlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <system_error>

#include "fusionlab/entangle.hpp"
#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

double unit_scale(EntropyBase base) { return base == EntropyBase::Bits ? 1.0 : std::numbers::ln2; }

const char *unit_name(EntropyBase base) { return base == EntropyBase::Bits ? "bits" : "nats"; }

Json complex_json(Complex z) { return Json::array({round12(z.real()), round12(z.imag())}); }

const char *arity_name(NeighborArity a) { return a == NeighborArity::One ? "one" : "two"; }

}  // namespace

std::string format_number(double x) {
    if (x == 0.0) {
        x = 0.0;
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

double round12(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    std::string s = format_number(x);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

Json matrix_to_json(const FusionMatrix &u) {
    Json rows = Json::array();
    for (int r = 0; r < 4; ++r) {
        Json row = Json::array();
        for (int c = 0; c < 4; ++c) {
            row.push_back(complex_json(u(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return Json{{"matrix", std::move(rows)}};
}

FusionMatrix matrix_from_json(const Json &j, double tol) {
    if (!j.is_object() || !j.contains("matrix") || !j["matrix"].is_array()) {
        throw MalformedInput("matrix file needs a top-level \"matrix\" array");
    }
    std::vector<std::vector<Complex>> grid;
    for (const auto &row : j["matrix"]) {
        if (!row.is_array()) {
            throw MalformedInput("matrix rows must be arrays");
        }
        std::vector<Complex> out;
        for (const auto &e : row) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw MalformedInput("matrix entries must be [re, im] number pairs");
            }
            out.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        grid.push_back(std::move(out));
    }
    return validate_unitary(grid, tol);
}

FusionMatrix read_matrix_file(const std::filesystem::path &path, double tol) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot read matrix file " + path.string());
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw MalformedInput("invalid JSON in " + path.string() + ": " + e.what());
    }
    return matrix_from_json(j, tol);
}

FusionMatrix resolve_matrix(const std::string &source, double tol) {
    for (const auto &name : builtin_names()) {
        if (name == source) {
            return builtin_matrix(name);
        }
    }
    if (source.rfind("haar:", 0) == 0) {
        std::uint64_t seed = 0;
        const char *first = source.data() + 5;
        const char *last = source.data() + source.size();
        auto res = std::from_chars(first, last, seed);
        if (res.ec != std::errc() || res.ptr != last || first == last) {
            throw MalformedInput("haar:<seed> expects an unsigned integer seed");
        }
        Rng rng(seed);
        return haar_sample(rng);
    }
    return read_matrix_file(source, tol);
}

Json coefficients_to_json(const StateCoefficients &c) {
    return Json{{"A", complex_json(c.a)}, {"B", complex_json(c.b)}, {"C", complex_json(c.c)}, {"D", complex_json(c.d)}};
}

Json classification_to_json(const StateClass &c) {
    Json out;
    out["labels"] = c.labels();
    Json params = Json::object();
    if (c.stabilizer) {
        params["Stabilizer"] = {{"phi", round12(c.stabilizer->phi)}};
    }
    if (c.weighted_graph) {
        const auto &w = *c.weighted_graph;
        params["WeightedGraph"] = {{"theta1", round12(w.theta1)}, {"phi1", round12(w.phi1)}, {"theta2", round12(w.theta2)},
                                   {"phi2", round12(w.phi2)},     {"chi", round12(w.chi)}};
    }
    if (c.cluster) {
        params["ClusterUpToRotation"] = {
            {"theta1", round12(c.cluster->theta1)}, {"theta2", round12(c.cluster->theta2)}, {"phi", round12(c.cluster->phi)}};
    }
    if (c.max_entangled) {
        const auto &m = *c.max_entangled;
        params["MaxEntangledGeneric"] = {{"theta_a", round12(m.theta_a)},
                                         {"theta_b", round12(m.theta_b)},
                                         {"theta_d", round12(m.theta_d)},
                                         {"phi", round12(m.phi)}};
    }
    out["parameters"] = std::move(params);
    return out;
}

Json analysis_report(const FusionMatrix &u, NeighborArity arity, EntropyBase base, double tol) {
    OutcomeTable table = outcome_table(u);
    DerivedInvariants inv = derive_invariants(u);
    double scale = unit_scale(base);

    Json invj;
    Json m = Json::array(), n = Json::array(), t = Json::array(), k = Json::array();
    for (int i = 0; i < 4; ++i) {
        m.push_back(round12(inv.m[i]));
        n.push_back(round12(inv.n[i]));
        t.push_back(complex_json(inv.t[i]));
        k.push_back(round12(inv.k[i]));
    }
    invj["m"] = m;
    invj["n"] = n;
    invj["t"] = t;
    invj["k"] = k;

    Json outcomes = Json::array();
    double expectation = 0.0;
    for (const auto &o : table.entries) {
        Json e;
        e["i"] = o.i.value();
        e["j"] = o.j.value();
        Json coeffs = coefficients_to_json(o.state);
        for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
            e[it.key()] = it.value();
        }
        e["probability"] = round12(o.probability);
        e["relevant"] = o.relevant;
        e["zero_probability"] = o.zero_probability;

        Json ent;
        if (o.zero_probability) {
            ent = {{"det", 0.0}, {"lambda", 1.0}, {"entropy", 0.0}, {"schmidt", {1.0, 0.0}}, {"max_entangled", false}};
        } else {
            double d = determinant(o);
            double lambda = eigenvalues_from_det(d).first;
            double s = entropy(lambda).bits;
            SchmidtPair sp = schmidt(o);
            bool maximal = o.relevant && is_maximally_entangled(u, o.i, o.j);
            ent = {{"det", round12(d)},
                   {"lambda", round12(lambda)},
                   {"entropy", round12(s * scale)},
                   {"schmidt", {round12(sp.alpha), round12(sp.beta)}},
                   {"max_entangled", maximal}};
            if (o.relevant) {
                expectation += o.probability * s;
            }
        }
        e["entanglement"] = std::move(ent);
        e["classification"] = classification_to_json(classify(o, arity, tol));
        outcomes.push_back(std::move(e));
    }

    Json out;
    out["source"] = u.provenance().describe();
    out["matrix"] = matrix_to_json(u)["matrix"];
    out["arity"] = arity_name(arity);
    out["unit"] = unit_name(base);
    out["total_probability"] = round12(table.total_probability());
    out["total_relevant_probability"] = round12(total_relevant_probability(u));
    out["expectation_entropy"] = round12(expectation * scale);
    out["invariants"] = std::move(invj);
    out["outcomes"] = std::move(outcomes);
    return out;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw MalformedInput("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw MalformedInput("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw MalformedInput("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string sweep_expectation_csv(const std::vector<SweepRow> &rows, EntropyBase base) {
    double scale = unit_scale(base);
    std::ostringstream out;
    out << "p_target,S_exp_max,S_exp_mean,p_total,states_used,seed,iterations,unit\n";
    for (const auto &r : rows) {
        out << format_number(r.target) << ',' << format_number(r.hard_value * scale) << ','
            << format_number(r.mean_hard_value * scale) << ',' << format_number(r.p_total) << ',' << r.states_used << ','
            << r.seed << ',' << r.iterations << ',' << unit_name(base) << '\n';
    }
    return out.str();
}

std::string sweep_threshold_csv(const std::vector<SweepRow> &rows, EntropyBase base) {
    double scale = unit_scale(base);
    std::ostringstream out;
    out << (base == EntropyBase::Bits ? "s_target_bits" : "s_target_nats")
        << ",P_max,P_mean,p_total,states_used,seed,iterations,unit\n";
    for (const auto &r : rows) {
        out << format_number(r.target * scale) << ',' << format_number(r.hard_value) << ','
            << format_number(r.mean_hard_value) << ',' << format_number(r.p_total) << ',' << r.states_used << ','
            << r.seed << ',' << r.iterations << ',' << unit_name(base) << '\n';
    }
    return out.str();
}

std::string scatter_csv(const ScatterResult &r, ObjectiveKind kind, EntropyBase base) {
    double scale = unit_scale(base);
    std::ostringstream out;
    if (kind == ObjectiveKind::Expectation) {
        out << "p_total,S_exp,unit\n";
        for (const auto &p : r.points) {
            out << format_number(p.x) << ',' << format_number(p.y * scale) << ',' << unit_name(base) << '\n';
        }
    } else {
        out << "s_target,P,unit\n";
        for (const auto &p : r.points) {
            out << format_number(p.x * scale) << ',' << format_number(p.y) << ',' << unit_name(base) << '\n';
        }
    }
    return out.str();
}

std::string scatter_summary_csv(const ScatterResult &r, ObjectiveKind kind, const std::vector<double> &s_targets,
                                EntropyBase base) {
    double scale = unit_scale(base);
    std::ostringstream out;
    out << "quantity,s_target,count,mean,stddev,unit\n";
    auto row = [&](const std::string &q, const std::string &s, const RunningStats &st, double f) {
        out << q << ',' << s << ',' << st.count << ',' << format_number(st.mean * f) << ','
            << format_number(st.stddev() * f) << ',' << unit_name(base) << '\n';
    };
    if (kind == ObjectiveKind::Expectation) {
        row("p_total", "", r.summaries.at(0), 1.0);
        row("S_exp", "", r.summaries.at(1), scale);
    } else {
        for (std::size_t t = 0; t < s_targets.size(); ++t) {
            row("P", format_number(s_targets[t] * scale), r.summaries.at(t), 1.0);
        }
    }
    return out.str();
}

}  // namespace fusionlab
