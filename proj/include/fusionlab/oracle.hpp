#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fusionlab/classify.hpp"
#include "fusionlab/entangle.hpp"
#include "fusionlab/fusion.hpp"

namespace fusionlab {

inline constexpr int kMaxQubits = 14;
inline constexpr double kStateTol = 1e-10;

/// Dense state on n qubits. Qubit q is bit q of the basis index.
class StateVector {
  public:
    /// |0...0>
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Complex> amplitudes);
    /// |+>^n
    static StateVector plus(int n_qubits);

    int qubits() const noexcept { return n_; }
    std::size_t size() const noexcept { return amp_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amp_; }
    Complex operator[](std::size_t index) const { return amp_[index]; }
    Complex &operator[](std::size_t index) { return amp_[index]; }

    double norm() const;
    /// Returns the norm before scaling.
    double normalize();
    Complex inner(const StateVector &other) const;

    void apply_x(int q);
    void apply_z(int q);
    void apply_phase(int q, double angle);
    void apply_cz(int a, int b);
    void apply_controlled_phase(int a, int b, double chi);
    void apply_single(int q, const Eigen::Matrix2cd &gate);

    /// this (low qubits) tensor other (high qubits)
    StateVector tensor(const StateVector &other) const;

  private:
    int n_;
    std::vector<Complex> amp_;
};

/// |<x|y>| / (|x| |y|)
double overlap_fidelity(const StateVector &x, const StateVector &y);
/// Equal up to a global phase: overlap_fidelity >= 1 - tol.
bool equal_up_to_phase(const StateVector &x, const StateVector &y, double tol = kStateTol);

struct SpecialEdge {
    int u = 0;
    int v = 0;
    double chi = 0.0;
};

/// Graph on vertices 0..n-1 with per-vertex stabilizer sign flags and at most
/// one edge carrying the diagonal gate e^{i chi |11><11|} instead of CZ.
struct GraphSpec {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> k_flags;
    std::optional<SpecialEdge> special;

    /// Throws MalformedInput on bad vertex ids, duplicate or self edges.
    void validate() const;
    std::vector<int> neighbors(int v) const;
    bool flag(int v) const { return v < static_cast<int>(k_flags.size()) && k_flags[v]; }

    static GraphSpec linear(int n);
};

/// Text form: "n [k_flags]" then "u v" per edge, optionally "special u v chi".
/// k_flags is a string of n characters from {0,1}; '#' starts a comment.
GraphSpec parse_graph_spec(const std::string &text);
std::string format_graph_spec(const GraphSpec &g);

StateVector build_graph_state(const GraphSpec &g);

/// K_a = X_a prod_{b in n(a)} Z_b applied to s.
StateVector apply_graph_stabilizer(const StateVector &s, const GraphSpec &g, int a);
/// K_a s = (-1)^{k_a} s for every vertex, within tol. Plain-edge graphs only.
bool check_stabilizers(const StateVector &s, const GraphSpec &g, double tol = kStateTol);

struct Projection {
    StateVector state;
    double weight = 0.0;
};

/// Projects (a, e) onto span{|00>, |11>} without shrinking the register.
/// weight is the norm of the projected vector.
Projection project_logical_pair(const StateVector &s, int a, int e);
/// Same projection, then |00> -> |0>_L and |11> -> |1>_L with L in a's slot
/// and e removed from the register. weight is the norm of the projection.
/// Both throw ZeroOverlap when the projection annihilates the state.
Projection merge_logical(const StateVector &s, int a, int e);

/// Applies A<00| + B<01| + C<10| + D<11| on (a, b) and removes both qubits.
/// weight is the squared norm of the unnormalized result.
Projection apply_fusion_projector(const StateVector &s, int a, int b, const StateCoefficients &c);

/// Von Neumann entropy of the reduced state on left_set.
EntropyValue bipartite_entropy(const StateVector &s, std::span<const int> left_set);

/// Two marked graph states. The left marked vertex is the logical qubit L,
/// realised physically as the pair (a, e); the right marked vertex is b.
struct FusionScenario {
    GraphSpec left;
    int left_marked = 0;
    GraphSpec right;
    int right_marked = 0;

    void validate() const;
    /// |n(b)|; only one and two neighbours are classified.
    NeighborArity arity() const;
    int input_qubits() const { return left.n + 1 + right.n; }

    /// Linear clusters with L at the end of the left one and b at the start
    /// of the right one, unless right_mark_middle is set.
    static FusionScenario linear(int left_n, int right_n, bool right_mark_middle = false);
};

/// Register bookkeeping after fusion: left vertices without L in their
/// original order, then e, then the right vertices without b.
struct FusedLayout {
    int qubits = 0;
    int e = 0;
    std::vector<int> left_qubits;      // includes e
    std::vector<int> right_qubits;
    std::vector<int> left_map;         // left vertex -> fused qubit (L -> e)
    std::vector<int> right_map;        // right vertex -> fused qubit, -1 for b
    std::vector<int> n_L;              // fused ids of n(L)
    std::vector<int> n_b;              // fused ids of n(b)
    GraphSpec graph;                   // target cluster: e joined to n(L) and n(b)
};

FusedLayout fused_layout(const FusionScenario &sc);

/// Random connected graphs with 2..max_side vertices per side, extra edges,
/// random k flags off the marked vertices. With a requested arity the right
/// marked vertex gets exactly one or at least two neighbours.
FusionScenario random_scenario(Rng &rng, int max_side = 4, std::optional<NeighborArity> arity = std::nullopt);

/// Input register: left graph state with L split into (a, e), then the right
/// graph state. Returns the state and the (a, b) qubit indices.
struct FusionInput {
    StateVector state;
    int a = 0;
    int b = 0;
};
FusionInput prepare_fusion_input(const FusionScenario &sc);

/// Full pipeline: prepare, project with c, drop a and b.
Projection fuse(const FusionScenario &sc, const StateCoefficients &c);

/// Normalized direct assembly of A|0>_e phi_L phi_b + B|0>_e phi_L Z_{n(b)} phi_b
/// + C|1>_e Z_{n(L)} phi_L phi_b + D|1>_e Z_{n(L)} phi_L Z_{n(b)} phi_b.
StateVector expected_fused_state(const FusionScenario &sc, const StateCoefficients &c);

/// T_e with the convention D = e^{i Phi} A, C = e^{i Phi} B.
Eigen::Matrix2cd te_operator(double phi);
/// K_e = T_e prod_{c in n(L) u n(b)} Z_c stabilizes s, and every other vertex
/// of the fused graph keeps a +-1 eigenvalue of its cluster stabilizer.
bool check_Te_stabilizer(const StateVector &s, const FusionScenario &sc, double phi, double tol = kStateTol);

/// Diagonal (e, d) gate fitted from the coefficients: Z phases on e and d plus
/// the weighted-edge angle chi. defect is the spread of the gate's moduli,
/// zero iff the gate is unitary up to scale.
struct EdgeGateFit {
    double chi = 0.0;
    double phase_e = 0.0;
    double phase_d = 0.0;
    double defect = 0.0;
};
EdgeGateFit fit_edge_gate(const StateCoefficients &c);

/// Fused target graph with (e, d) promoted to a chi edge and Z phases on e, d.
StateVector weighted_graph_candidate(const FusionScenario &sc, double chi, double phase_e, double phase_d);

/// The fused state equals the weighted-graph candidate built with the given
/// parameters, up to a global phase. Requires arity one.
bool check_weighted_graph_equivalence(const StateVector &s, const FusionScenario &sc, const EdgeGateFit &params,
                                      double tol = kStateTol);
/// Fits the Z phases from c for each chi on an even grid and reports whether
/// any grid point matches.
bool weighted_graph_equivalent_on_grid(const StateVector &s, const FusionScenario &sc, const StateCoefficients &c,
                                       int grid_points = 360, double tol = kStateTol);

/// Outcome table from a direct two-photon Fock-space expansion of
/// (f1 a_H + f2 a_V)(f3 b_H + f4 b_V)/2 under U.
OutcomeTable bosonic_outcome_table(const FusionMatrix &u);

struct TableComparison {
    double max_probability_deviation = 0.0;
    /// Largest componentwise distance after aligning the per-outcome phase.
    double max_coefficient_deviation = 0.0;
    /// Largest 1 - |<x|y>| over outcomes with nonzero probability.
    double max_phase_insensitive_defect = 0.0;

    double worst() const;
};
TableComparison compare_tables(const OutcomeTable &x, const OutcomeTable &y);

}  // namespace fusionlab
