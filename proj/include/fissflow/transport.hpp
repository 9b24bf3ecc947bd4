#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fissflow/fields.hpp"
#include "fissflow/lifting.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

// Rate matrix of the transport chain over the extended triangulation:
// triangle states first, absorbing boundary edge-elements after. Rows of
// boundary states are identically zero.
struct Generator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> Q;
    int n_tri = 0;
    int n_states = 0;

    double exit_rate(int state) const { return -Q.coeff(state, state); }
    bool absorbing(int state) const { return Q.row(state).nonZeros() == 0; }
};

Generator generator(const ElementField3& u, const ElementField2& v, const LiftedGeometry& geo,
                    const Triangulation& t);

// Dense transition matrix exp(Qt), computed by uniformization (with dense
// squaring for large rate*time products). Tiny negative round-off entries are
// clamped to zero.
Eigen::MatrixXd transition(const Generator& q, double time);

// Action x -> exp(Qt) x without forming the dense matrix.
Eigen::VectorXd transition_apply(const Generator& q, double time, const Eigen::VectorXd& x);

// Embedded jump chain: row-stochastic over all states; absorbing states carry
// a unit self-loop.
struct JumpChain {
    Eigen::SparseMatrix<double, Eigen::RowMajor> Qt;
    int n_tri = 0;
};

JumpChain jump_chain(const Generator& q);

// Directed graph of positive off-diagonal jump probabilities.
struct FlowGraph {
    std::vector<std::vector<int>> successors;  // self-loops excluded
    std::vector<bool> self_loop;
    int n_tri = 0;

    int n_states() const { return static_cast<int>(successors.size()); }
    // K is upstream of L: some path of positive-probability jumps leads K -> L
    bool upstream(int from, int to) const;
};

FlowGraph flow_graph(const JumpChain& qt);

// True when removing self-loops leaves the graph acyclic; otherwise the
// witness holds one cycle [K, ..., K].
struct ForestCheck {
    bool is_forest = false;
    std::vector<int> witness_cycle;
};

ForestCheck assert_forest(const FlowGraph& g);

// Survival probabilities Phi_K(t), one per triangle.
Eigen::VectorXd exit_time_distribution(const Generator& q, double time);

// Expected exit times via the transient-block linear solve. Triangles that
// can reach a state with no path to the boundary get infinity.
struct ExitTimes {
    Eigen::VectorXd psi;              // per triangle; +inf where stranded
    std::vector<bool> finite;
    bool all_finite = true;
    int n_stranded = 0;
};

ExitTimes expected_exit_times(const Generator& q);

struct MonteCarloResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_particles = 0;
    std::int64_t n_censored = 0;  // particles cut off at the horizon
};

// Jump-chain simulation with exponential holding times; particle k draws from
// an independent substream of (seed, k), so results are reproducible.
MonteCarloResult monte_carlo_exit(const Generator& q, int start, std::int64_t n_particles,
                                  std::uint64_t seed, double censor_horizon = 1e9);

}  // namespace fissflow
