#include "fusionlab/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <locale>
#include <numbers>
#include <set>
#include <sstream>

#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::size_t bit(int q) { return std::size_t{1} << q; }

void check_qubit(int q, int n) {
    if (q < 0 || q >= n) {
        throw OutOfRange("qubit " + std::to_string(q) + " outside register of " + std::to_string(n));
    }
}

// Inserts zero bits at the sorted positions in `removed`.
std::size_t expand_index(std::size_t r, const std::vector<int> &removed) {
    std::size_t out = r;
    for (int pos : removed) {
        std::size_t low = out & (bit(pos) - 1);
        std::size_t high = out >> pos;
        out = (high << (pos + 1)) | low;
    }
    return out;
}

double distance(const StateVector &x, const StateVector &y, Complex scale = 1.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::norm(x[i] - scale * y[i]);
    }
    return std::sqrt(acc);
}

StateVector normalized(StateVector s) {
    s.normalize();
    return s;
}

std::string trim_comment(const std::string &line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 0) {
        throw OutOfRange("negative qubit count");
    }
    if (n_qubits > kMaxQubits) {
        throw TooManyQubits(n_qubits);
    }
    amp_.assign(bit(n_qubits), Complex{});
    amp_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes) : StateVector(n_qubits) {
    if (amplitudes.size() != amp_.size()) {
        throw MalformedInput("amplitude count does not match 2^n");
    }
    amp_ = std::move(amplitudes);
}

StateVector StateVector::plus(int n_qubits) {
    StateVector s(n_qubits);
    double v = std::pow(kInvSqrt2, n_qubits);
    std::fill(s.amp_.begin(), s.amp_.end(), Complex(v, 0.0));
    return s;
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const Complex &c : amp_) {
        acc += std::norm(c);
    }
    return std::sqrt(acc);
}

double StateVector::normalize() {
    double nrm = norm();
    if (nrm > 0.0) {
        for (Complex &c : amp_) {
            c /= nrm;
        }
    }
    return nrm;
}

Complex StateVector::inner(const StateVector &other) const {
    if (other.n_ != n_) {
        throw MalformedInput("inner product of registers with different sizes");
    }
    Complex acc{};
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        acc += std::conj(amp_[i]) * other.amp_[i];
    }
    return acc;
}

void StateVector::apply_x(int q) {
    check_qubit(q, n_);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (!(i & bit(q))) {
            std::swap(amp_[i], amp_[i | bit(q)]);
        }
    }
}

void StateVector::apply_z(int q) { apply_phase(q, kPi); }

void StateVector::apply_phase(int q, double angle) {
    check_qubit(q, n_);
    Complex ph = angle == kPi ? Complex(-1.0, 0.0) : std::polar(1.0, angle);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit(q)) {
            amp_[i] *= ph;
        }
    }
}

void StateVector::apply_cz(int a, int b) { apply_controlled_phase(a, b, kPi); }

void StateVector::apply_controlled_phase(int a, int b, double chi) {
    check_qubit(a, n_);
    check_qubit(b, n_);
    if (a == b) {
        throw MalformedInput("two-qubit gate on a single qubit");
    }
    Complex ph = chi == kPi ? Complex(-1.0, 0.0) : std::polar(1.0, chi);
    std::size_t mask = bit(a) | bit(b);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if ((i & mask) == mask) {
            amp_[i] *= ph;
        }
    }
}

void StateVector::apply_single(int q, const Eigen::Matrix2cd &gate) {
    check_qubit(q, n_);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (!(i & bit(q))) {
            Complex x0 = amp_[i];
            Complex x1 = amp_[i | bit(q)];
            amp_[i] = gate(0, 0) * x0 + gate(0, 1) * x1;
            amp_[i | bit(q)] = gate(1, 0) * x0 + gate(1, 1) * x1;
        }
    }
}

StateVector StateVector::tensor(const StateVector &other) const {
    int total = n_ + other.n_;
    if (total > kMaxQubits) {
        throw TooManyQubits(total);
    }
    StateVector out(total);
    for (std::size_t hi = 0; hi < other.amp_.size(); ++hi) {
        for (std::size_t lo = 0; lo < amp_.size(); ++lo) {
            out.amp_[(hi << n_) | lo] = amp_[lo] * other.amp_[hi];
        }
    }
    return out;
}

double overlap_fidelity(const StateVector &x, const StateVector &y) {
    double nx = x.norm();
    double ny = y.norm();
    if (nx == 0.0 || ny == 0.0) {
        return 0.0;
    }
    return std::abs(x.inner(y)) / (nx * ny);
}

bool equal_up_to_phase(const StateVector &x, const StateVector &y, double tol) {
    return x.qubits() == y.qubits() && overlap_fidelity(x, y) >= 1.0 - tol;
}

void GraphSpec::validate() const {
    if (n < 0) {
        throw MalformedInput("negative vertex count");
    }
    if (!k_flags.empty() && static_cast<int>(k_flags.size()) != n) {
        throw MalformedInput("k_flags length differs from vertex count");
    }
    std::set<std::pair<int, int>> seen;
    auto add = [&](int u, int v) {
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw MalformedInput("edge (" + std::to_string(u) + "," + std::to_string(v) + ") references a missing vertex");
        }
        if (u == v) {
            throw MalformedInput("self edge on vertex " + std::to_string(u));
        }
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) {
            throw MalformedInput("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
        }
    };
    for (auto [u, v] : edges) {
        add(u, v);
    }
    if (special) {
        add(special->u, special->v);
        if (!std::isfinite(special->chi)) {
            throw MalformedInput("special edge angle is not finite");
        }
    }
}

std::vector<int> GraphSpec::neighbors(int v) const {
    std::vector<int> out;
    for (auto [a, b] : edges) {
        if (a == v) {
            out.push_back(b);
        } else if (b == v) {
            out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

GraphSpec GraphSpec::linear(int n) {
    GraphSpec g;
    g.n = n;
    for (int v = 0; v + 1 < n; ++v) {
        g.edges.emplace_back(v, v + 1);
    }
    return g;
}

GraphSpec parse_graph_spec(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    GraphSpec g;
    bool header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(trim_comment(line));
        ls.imbue(std::locale::classic());
        std::string first;
        if (!(ls >> first)) {
            continue;
        }
        auto fail = [&](const std::string &what) {
            throw ParseError("graph spec line " + std::to_string(line_no) + ": " + what);
        };
        auto to_int = [&](const std::string &tok) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(tok, &used);
            } catch (const std::exception &) {
                fail("expected an integer, got '" + tok + "'");
            }
            if (used != tok.size()) {
                fail("expected an integer, got '" + tok + "'");
            }
            return v;
        };
        std::string extra;
        if (!header) {
            g.n = to_int(first);
            if (g.n < 0) {
                fail("negative vertex count");
            }
            std::string flags;
            if (ls >> flags) {
                if (static_cast<int>(flags.size()) != g.n ||
                    flags.find_first_not_of("01") != std::string::npos) {
                    fail("k_flags must be " + std::to_string(g.n) + " characters from {0,1}");
                }
                for (char c : flags) {
                    g.k_flags.push_back(c == '1');
                }
            }
            if (ls >> extra) {
                fail("unexpected token '" + extra + "'");
            }
            header = true;
            continue;
        }
        if (first == "special") {
            std::string su, sv;
            double chi = 0.0;
            if (!(ls >> su >> sv >> chi)) {
                fail("expected 'special u v chi'");
            }
            if (g.special) {
                fail("more than one special edge");
            }
            g.special = SpecialEdge{to_int(su), to_int(sv), chi};
        } else {
            std::string sv;
            if (!(ls >> sv)) {
                fail("expected 'u v'");
            }
            g.edges.emplace_back(to_int(first), to_int(sv));
        }
        if (ls >> extra) {
            fail("unexpected token '" + extra + "'");
        }
    }
    if (!header) {
        throw ParseError("graph spec is empty");
    }
    try {
        g.validate();
    } catch (const MalformedInput &e) {
        throw ParseError(e.what());
    }
    return g;
}

std::string format_graph_spec(const GraphSpec &g) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << g.n;
    if (!g.k_flags.empty()) {
        out << ' ';
        for (bool f : g.k_flags) {
            out << (f ? '1' : '0');
        }
    }
    out << '\n';
    for (auto [u, v] : g.edges) {
        out << u << ' ' << v << '\n';
    }
    if (g.special) {
        out << "special " << g.special->u << ' ' << g.special->v << ' ' << std::setprecision(17) << g.special->chi
            << '\n';
    }
    return out.str();
}

StateVector build_graph_state(const GraphSpec &g) {
    if (g.n > kMaxQubits) {
        throw TooManyQubits(g.n);
    }
    g.validate();
    StateVector s = StateVector::plus(g.n);
    for (auto [u, v] : g.edges) {
        s.apply_cz(u, v);
    }
    if (g.special) {
        s.apply_controlled_phase(g.special->u, g.special->v, g.special->chi);
    }
    for (int v = 0; v < g.n; ++v) {
        if (g.flag(v)) {
            s.apply_z(v);
        }
    }
    return s;
}

StateVector apply_graph_stabilizer(const StateVector &s, const GraphSpec &g, int a) {
    StateVector out = s;
    out.apply_x(a);
    for (int b : g.neighbors(a)) {
        out.apply_z(b);
    }
    return out;
}

bool check_stabilizers(const StateVector &s, const GraphSpec &g, double tol) {
    if (g.special) {
        throw MalformedInput("stabilizer check needs a graph without a special edge");
    }
    if (s.qubits() != g.n) {
        throw MalformedInput("state and graph have different sizes");
    }
    for (int a = 0; a < g.n; ++a) {
        double sign = g.flag(a) ? -1.0 : 1.0;
        if (distance(apply_graph_stabilizer(s, g, a), s, sign) > tol) {
            return false;
        }
    }
    return true;
}

Projection project_logical_pair(const StateVector &s, int a, int e) {
    check_qubit(a, s.qubits());
    check_qubit(e, s.qubits());
    if (a == e) {
        throw MalformedInput("logical pair needs two distinct qubits");
    }
    std::vector<Complex> amp(s.amplitudes().begin(), s.amplitudes().end());
    for (std::size_t i = 0; i < amp.size(); ++i) {
        if (static_cast<bool>(i & bit(a)) != static_cast<bool>(i & bit(e))) {
            amp[i] = 0.0;
        }
    }
    StateVector out(s.qubits(), std::move(amp));
    double weight = out.normalize();
    if (!(weight > 0.0)) {
        throw ZeroOverlap("state is orthogonal to the logical span of the pair");
    }
    return {std::move(out), weight};
}

Projection merge_logical(const StateVector &s, int a, int e) {
    Projection p = project_logical_pair(s, a, e);
    int n = s.qubits() - 1;
    StateVector out(n);
    std::vector<int> removed{e};
    for (std::size_t r = 0; r < out.size(); ++r) {
        std::size_t full = expand_index(r, removed);
        if (full & bit(a)) {
            full |= bit(e);
        }
        out[r] = p.state[full];
    }
    return {std::move(out), p.weight};
}

Projection apply_fusion_projector(const StateVector &s, int a, int b, const StateCoefficients &c) {
    check_qubit(a, s.qubits());
    check_qubit(b, s.qubits());
    if (a == b) {
        throw MalformedInput("fusion needs two distinct qubits");
    }
    StateVector out(s.qubits() - 2);
    std::vector<int> removed{std::min(a, b), std::max(a, b)};
    for (std::size_t r = 0; r < out.size(); ++r) {
        std::size_t base = expand_index(r, removed);
        out[r] = c.a * s[base] + c.b * s[base | bit(b)] + c.c * s[base | bit(a)] + c.d * s[base | bit(a) | bit(b)];
    }
    double nrm = out.normalize();
    if (!(nrm > 0.0)) {
        throw ZeroOverlap("fusion projector annihilates the state");
    }
    return {std::move(out), nrm * nrm};
}

EntropyValue bipartite_entropy(const StateVector &s, std::span<const int> left_set) {
    int n = s.qubits();
    std::vector<bool> in_left(n, false);
    for (int q : left_set) {
        check_qubit(q, n);
        if (in_left[q]) {
            throw MalformedInput("duplicate qubit in bipartition");
        }
        in_left[q] = true;
    }
    std::vector<int> left, right;
    for (int q = 0; q < n; ++q) {
        (in_left[q] ? left : right).push_back(q);
    }
    if (left.empty() || right.empty()) {
        throw OutOfRange("bipartition must be non-trivial");
    }
    auto offsets = [](const std::vector<int> &qs) {
        std::vector<std::size_t> out(bit(static_cast<int>(qs.size())), 0);
        for (std::size_t x = 0; x < out.size(); ++x) {
            for (std::size_t k = 0; k < qs.size(); ++k) {
                if (x & bit(static_cast<int>(k))) {
                    out[x] |= bit(qs[k]);
                }
            }
        }
        return out;
    };
    auto off_l = offsets(left);
    auto off_r = offsets(right);
    Eigen::MatrixXcd m(off_l.size(), off_r.size());
    for (std::size_t i = 0; i < off_l.size(); ++i) {
        for (std::size_t j = 0; j < off_r.size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[off_l[i] | off_r[j]];
        }
    }
    double nrm2 = m.squaredNorm();
    Eigen::MatrixXcd rho = m.rows() <= m.cols() ? Eigen::MatrixXcd(m * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * m);
    rho /= nrm2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    double bits = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        double lam = solver.eigenvalues()(k);
        if (lam > 0.0) {
            bits -= lam * std::log2(lam);
        }
    }
    return {bits < 0.0 ? 0.0 : bits};
}

void FusionScenario::validate() const {
    left.validate();
    right.validate();
    if (input_qubits() > kMaxQubits) {
        throw TooManyQubits(input_qubits());
    }
    if (left.special || right.special) {
        throw MalformedInput("fusion scenarios use plain-edge graphs");
    }
    if (left_marked < 0 || left_marked >= left.n) {
        throw MalformedInput("left marked vertex is missing");
    }
    if (right_marked < 0 || right_marked >= right.n) {
        throw MalformedInput("right marked vertex is missing");
    }
    if (left.neighbors(left_marked).empty() || right.neighbors(right_marked).empty()) {
        throw MalformedInput("marked vertices need at least one neighbour");
    }
    if (left.flag(left_marked) || right.flag(right_marked)) {
        throw MalformedInput("marked vertices must have k = 0");
    }
}

NeighborArity FusionScenario::arity() const {
    return right.neighbors(right_marked).size() == 1 ? NeighborArity::One : NeighborArity::Two;
}

FusionScenario FusionScenario::linear(int left_n, int right_n, bool right_mark_middle) {
    FusionScenario sc;
    sc.left = GraphSpec::linear(left_n);
    sc.left_marked = left_n - 1;
    sc.right = GraphSpec::linear(right_n);
    sc.right_marked = right_mark_middle ? right_n / 2 : 0;
    return sc;
}

FusedLayout fused_layout(const FusionScenario &sc) {
    sc.validate();
    FusedLayout out;
    int nl = sc.left.n;
    int nr = sc.right.n;
    out.qubits = nl + nr - 1;
    out.e = nl - 1;
    out.left_map.resize(nl);
    for (int v = 0; v < nl; ++v) {
        out.left_map[v] = v == sc.left_marked ? out.e : (v < sc.left_marked ? v : v - 1);
    }
    out.right_map.resize(nr);
    for (int w = 0; w < nr; ++w) {
        out.right_map[w] = w == sc.right_marked ? -1 : nl + (w < sc.right_marked ? w : w - 1);
    }
    for (int q = 0; q < nl; ++q) {
        out.left_qubits.push_back(q);
    }
    for (int q = nl; q < out.qubits; ++q) {
        out.right_qubits.push_back(q);
    }
    for (int v : sc.left.neighbors(sc.left_marked)) {
        out.n_L.push_back(out.left_map[v]);
    }
    for (int w : sc.right.neighbors(sc.right_marked)) {
        out.n_b.push_back(out.right_map[w]);
    }
    GraphSpec &g = out.graph;
    g.n = out.qubits;
    g.k_flags.assign(out.qubits, false);
    for (auto [u, v] : sc.left.edges) {
        g.edges.emplace_back(out.left_map[u], out.left_map[v]);
    }
    for (auto [u, v] : sc.right.edges) {
        if (u != sc.right_marked && v != sc.right_marked) {
            g.edges.emplace_back(out.right_map[u], out.right_map[v]);
        }
    }
    for (int d : out.n_b) {
        g.edges.emplace_back(out.e, d);
    }
    for (int v = 0; v < nl; ++v) {
        g.k_flags[out.left_map[v]] = sc.left.flag(v);
    }
    for (int w = 0; w < nr; ++w) {
        if (w != sc.right_marked) {
            g.k_flags[out.right_map[w]] = sc.right.flag(w);
        }
    }
    return out;
}

namespace {

GraphSpec random_connected_graph(Rng &rng, int n) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    GraphSpec g;
    g.n = n;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        g.edges.emplace_back(parent(rng), v);
    }
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            auto nb = g.neighbors(u);
            if (!std::binary_search(nb.begin(), nb.end(), v) && coin(rng) < 0.3) {
                g.edges.emplace_back(u, v);
            }
        }
    }
    g.k_flags.assign(n, false);
    for (int v = 0; v < n; ++v) {
        g.k_flags[v] = coin(rng) < 0.3;
    }
    return g;
}

// Attaches a fresh marked vertex to `count` distinct existing vertices.
int attach_marked(Rng &rng, GraphSpec &g, int count) {
    std::vector<int> order(g.n);
    for (int v = 0; v < g.n; ++v) {
        order[v] = v;
    }
    std::shuffle(order.begin(), order.end(), rng);
    int marked = g.n;
    g.n += 1;
    g.k_flags.push_back(false);
    for (int k = 0; k < count; ++k) {
        g.edges.emplace_back(order[k], marked);
    }
    return marked;
}

}  // namespace

FusionScenario random_scenario(Rng &rng, int max_side, std::optional<NeighborArity> arity) {
    if (max_side < 2) {
        throw OutOfRange("scenario sides need at least two vertices");
    }
    std::uniform_int_distribution<int> size(1, max_side - 1);
    FusionScenario sc;
    sc.left = random_connected_graph(rng, size(rng));
    std::uniform_int_distribution<int> left_deg(1, sc.left.n);
    sc.left_marked = attach_marked(rng, sc.left, left_deg(rng));

    NeighborArity want = arity.value_or(std::uniform_int_distribution<int>(0, 1)(rng) ? NeighborArity::One
                                                                                        : NeighborArity::Two);
    int rest = size(rng);
    if (want == NeighborArity::Two && rest < 2) {
        rest = 2;
    }
    sc.right = random_connected_graph(rng, rest);
    int degree = want == NeighborArity::One ? 1 : std::uniform_int_distribution<int>(2, rest)(rng);
    sc.right_marked = attach_marked(rng, sc.right, degree);
    sc.validate();
    return sc;
}

FusionInput prepare_fusion_input(const FusionScenario &sc) {
    sc.validate();
    StateVector left = build_graph_state(sc.left).tensor(StateVector::plus(1));
    Projection logical = project_logical_pair(left, sc.left_marked, sc.left.n);
    StateVector full = logical.state.tensor(build_graph_state(sc.right));
    return {std::move(full), sc.left_marked, sc.left.n + 1 + sc.right_marked};
}

Projection fuse(const FusionScenario &sc, const StateCoefficients &c) {
    FusionInput in = prepare_fusion_input(sc);
    return apply_fusion_projector(in.state, in.a, in.b, c);
}

StateVector expected_fused_state(const FusionScenario &sc, const StateCoefficients &c) {
    FusedLayout lay = fused_layout(sc);
    GraphSpec base_graph = lay.graph;
    base_graph.edges.clear();
    for (auto [u, v] : lay.graph.edges) {
        if (u != lay.e && v != lay.e) {
            base_graph.edges.emplace_back(u, v);
        }
    }
    StateVector base = build_graph_state(base_graph);
    StateVector out(lay.qubits);
    out[0] = 0.0;
    const std::array<Complex, 4> coef{c.a, c.b, c.c, c.d};
    for (int branch = 0; branch < 4; ++branch) {
        bool xe = branch >= 2;
        bool zb = branch % 2 == 1;
        StateVector term = base;
        for (std::size_t i = 0; i < term.size(); ++i) {
            if (static_cast<bool>(i & bit(lay.e)) != xe) {
                term[i] = 0.0;
            }
        }
        if (xe) {
            for (int q : lay.n_L) {
                term.apply_z(q);
            }
        }
        if (zb) {
            for (int q : lay.n_b) {
                term.apply_z(q);
            }
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += coef[branch] * term[i];
        }
    }
    if (!(out.normalize() > 0.0)) {
        throw ZeroOverlap("coefficients vanish");
    }
    return out;
}

Eigen::Matrix2cd te_operator(double phi) {
    Eigen::Matrix2cd t;
    t << Complex{}, std::polar(1.0, -phi), std::polar(1.0, phi), Complex{};
    return t;
}

bool check_Te_stabilizer(const StateVector &s, const FusionScenario &sc, double phi, double tol) {
    FusedLayout lay = fused_layout(sc);
    if (s.qubits() != lay.qubits) {
        throw MalformedInput("state does not live on the fused register");
    }
    StateVector psi = normalized(s);
    StateVector ke = psi;
    for (int q : lay.n_L) {
        ke.apply_z(q);
    }
    for (int q : lay.n_b) {
        ke.apply_z(q);
    }
    ke.apply_single(lay.e, te_operator(phi));
    if (distance(ke, psi) > tol) {
        return false;
    }
    for (int v = 0; v < lay.qubits; ++v) {
        if (v == lay.e) {
            continue;
        }
        StateVector kv = apply_graph_stabilizer(psi, lay.graph, v);
        double sign = lay.graph.flag(v) ? -1.0 : 1.0;
        bool ok = distance(kv, psi, sign) <= tol;
        if (!ok && std::find(lay.n_b.begin(), lay.n_b.end(), v) != lay.n_b.end()) {
            ok = distance(kv, psi, -sign) <= tol;
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

EdgeGateFit fit_edge_gate(const StateCoefficients &c) {
    StateCoefficients n = c.normalized();
    std::array<Complex, 4> g{n.a + n.b, n.a - n.b, n.c + n.d, n.c - n.d};
    EdgeGateFit fit;
    fit.phase_d = wrap_pi(std::arg(g[1]) - std::arg(g[0]));
    fit.phase_e = wrap_pi(std::arg(g[2]) - std::arg(g[0]));
    fit.chi = wrap_two_pi(std::arg(g[3]) - std::arg(g[2]) - std::arg(g[1]) + std::arg(g[0]));
    auto [lo, hi] = std::minmax({std::abs(g[0]), std::abs(g[1]), std::abs(g[2]), std::abs(g[3])});
    fit.defect = hi - lo;
    return fit;
}

StateVector weighted_graph_candidate(const FusionScenario &sc, double chi, double phase_e, double phase_d) {
    FusedLayout lay = fused_layout(sc);
    if (lay.n_b.size() != 1) {
        throw OutOfRange("weighted-graph equivalence needs a single neighbour of b");
    }
    int d = lay.n_b.front();
    GraphSpec g = lay.graph;
    std::erase_if(g.edges, [&](const std::pair<int, int> &edge) {
        return (edge.first == lay.e && edge.second == d) || (edge.first == d && edge.second == lay.e);
    });
    g.special = SpecialEdge{lay.e, d, chi};
    StateVector s = build_graph_state(g);
    s.apply_phase(lay.e, phase_e);
    s.apply_phase(d, phase_d);
    return s;
}

bool check_weighted_graph_equivalence(const StateVector &s, const FusionScenario &sc, const EdgeGateFit &params,
                                      double tol) {
    StateVector candidate = weighted_graph_candidate(sc, params.chi, params.phase_e, params.phase_d);
    return equal_up_to_phase(s, candidate, tol);
}

bool weighted_graph_equivalent_on_grid(const StateVector &s, const FusionScenario &sc, const StateCoefficients &c,
                                       int grid_points, double tol) {
    if (grid_points < 1) {
        throw OutOfRange("grid needs at least one point");
    }
    EdgeGateFit fit = fit_edge_gate(c);
    for (int k = 0; k < grid_points; ++k) {
        fit.chi = 2.0 * kPi * k / grid_points;
        if (check_weighted_graph_equivalence(s, sc, fit, tol)) {
            return true;
        }
    }
    return false;
}

OutcomeTable bosonic_outcome_table(const FusionMatrix &u) {
    const Matrix4 &m = u.matrix();
    // amp[f][l][l'] for f = (p, q) in f1f3, f1f4, f2f3, f2f4 and modes l <= l'.
    std::array<std::array<std::array<Complex, 4>, 4>, 4> amp{};
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            int f = 2 * p + q;
            int row_a = p;
            int row_b = 2 + q;
            for (int l = 0; l < 4; ++l) {
                for (int lp = 0; lp < 4; ++lp) {
                    int lo = std::min(l, lp);
                    int hi = std::max(l, lp);
                    amp[f][lo][hi] += 0.5 * m(row_a, l) * m(row_b, lp);
                }
            }
            for (int l = 0; l < 4; ++l) {
                amp[f][l][l] *= std::sqrt(2.0);
            }
        }
    }
    OutcomeTable table;
    for (int k = 0; k < kOutcomeCount; ++k) {
        int i = kOutcomeOrder[k][0];
        int j = kOutcomeOrder[k][1];
        OutcomeCoefficients &o = table.entries[k];
        o.i = ChannelIndex(i);
        o.j = ChannelIndex(j);
        o.relevant = i != j;
        StateCoefficients raw{amp[0][i - 1][j - 1], amp[1][i - 1][j - 1], amp[2][i - 1][j - 1], amp[3][i - 1][j - 1]};
        o.probability = raw.norm_squared();
        o.norm = std::sqrt((o.relevant ? 4.0 : 2.0) * o.probability);
        o.zero_probability = o.probability <= kZeroProbability;
        o.state = o.zero_probability ? raw.scaled(o.relevant ? 2.0 : std::sqrt(2.0)) : raw.normalized();
    }
    return table;
}

double TableComparison::worst() const {
    return std::max({max_probability_deviation, max_coefficient_deviation, max_phase_insensitive_defect});
}

TableComparison compare_tables(const OutcomeTable &x, const OutcomeTable &y) {
    constexpr double kCoefficientFloor = 1e-12;
    TableComparison out;
    for (int k = 0; k < kOutcomeCount; ++k) {
        const OutcomeCoefficients &a = x.entries[k];
        const OutcomeCoefficients &b = y.entries[k];
        out.max_probability_deviation = std::max(out.max_probability_deviation, std::abs(a.probability - b.probability));
        if (a.probability <= kCoefficientFloor || b.probability <= kCoefficientFloor) {
            continue;
        }
        const StateCoefficients &s = a.state;
        const StateCoefficients &t = b.state;
        Complex ov = std::conj(s.a) * t.a + std::conj(s.b) * t.b + std::conj(s.c) * t.c + std::conj(s.d) * t.d;
        out.max_phase_insensitive_defect = std::max(out.max_phase_insensitive_defect, 1.0 - std::abs(ov));
        Complex align = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
        out.max_coefficient_deviation = std::max(out.max_coefficient_deviation, max_component_distance(s.scaled(align), t));
    }
    return out;
}

}  // namespace fusionlab
