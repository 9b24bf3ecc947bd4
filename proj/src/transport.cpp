#include "fissflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/SparseLU>

#include "fissflow/errors.hpp"
#include "fissflow/rng.hpp"

namespace fissflow {

namespace {

constexpr double kPoissonTailTol = 1e-12;  // uniformization truncation per step

// number of Poisson terms needed so the tail mass is below the tolerance
int poisson_terms(double mean) {
    if (mean <= 0.0) return 0;
    const int cap = static_cast<int>(std::ceil(mean + 10.0 * std::sqrt(mean) + 30.0));
    double log_term = -mean;  // log of pmf at k=0
    double cumulative = std::exp(log_term);
    int k = 0;
    while (k < cap && 1.0 - cumulative > kPoissonTailTol) {
        ++k;
        log_term += std::log(mean / k);
        cumulative += std::exp(log_term);
    }
    return std::max(k, 1);
}

}  // namespace

Generator generator(const ElementField3& u, const ElementField2& v, const LiftedGeometry& geo,
                    const Triangulation& t) {
    if (u.size() != t.n_triangles() || v.size() != t.n_triangles())
        throw InvalidInputError("generator: field size mismatch");

    Generator gen;
    gen.n_tri = t.n_triangles();
    gen.n_states = t.n_states();
    gen.Q.resize(gen.n_states, gen.n_states);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * t.n_triangles()));
    for (int k = 0; k < t.n_triangles(); ++k) {
        const double inv_area = 1.0 / geo.area3d[static_cast<std::size_t>(k)];
        double total = 0.0;
        for (int ei : t.tri_edges[static_cast<std::size_t>(k)]) {
            // the lift preserves edge-normal components, so the 2D flux equals
            // the 3D one; edge lengths must be the lifted ones
            const double flux = v[k].dot(t.outward_normal(ei, k));
            if (flux <= 0.0) continue;
            const double rate = geo.edge_length3d[static_cast<std::size_t>(ei)] * flux * inv_area;
            trip.emplace_back(k, t.neighbor_state(ei, k), rate);
            total += rate;
        }
        if (total > 0.0) trip.emplace_back(k, k, -total);
    }
    gen.Q.setFromTriplets(trip.begin(), trip.end());
    return gen;
}

namespace {

double max_rate(const Generator& gen) {
    double lambda = 0.0;
    for (int s = 0; s < gen.n_states; ++s) lambda = std::max(lambda, -gen.Q.coeff(s, s));
    return lambda;
}

// uniformized jump matrix P = I + Q/lambda (row-stochastic)
Eigen::SparseMatrix<double, Eigen::RowMajor> uniformized(const Generator& gen, double lambda) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> p = gen.Q / lambda;
    Eigen::SparseMatrix<double, Eigen::RowMajor> id(gen.n_states, gen.n_states);
    id.setIdentity();
    return (p + id).pruned();
}

}  // namespace

Eigen::MatrixXd transition(const Generator& gen, double time) {
    if (time < 0.0) throw InvalidInputError("transition: time must be non-negative");
    const int n = gen.n_states;
    const double lambda = max_rate(gen);
    if (time == 0.0 || lambda == 0.0) return Eigen::MatrixXd::Identity(n, n);

    // split so the per-step Poisson mean stays small, then square back up
    int squarings = 0;
    double tau = time;
    while (lambda * tau > 32.0) {
        tau *= 0.5;
        ++squarings;
    }

    const auto P = uniformized(gen, lambda);
    const double mean = lambda * tau;
    const int terms = poisson_terms(mean);

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    double weight = std::exp(-mean);
    acc.diagonal().array() += weight;
    for (int k = 1; k <= terms; ++k) {
        power = P * power;
        weight *= mean / k;
        acc.noalias() += weight * power;
    }
    for (int s = 0; s < squarings; ++s) acc = acc * acc;

    // round-off may leave tiny negatives
    acc = acc.cwiseMax(0.0);
    return acc;
}

Eigen::VectorXd transition_apply(const Generator& gen, double time, const Eigen::VectorXd& x) {
    if (time < 0.0) throw InvalidInputError("transition_apply: time must be non-negative");
    if (x.size() != gen.n_states) throw InvalidInputError("transition_apply: vector size mismatch");
    const double lambda = max_rate(gen);
    if (time == 0.0 || lambda == 0.0) return x;

    const auto P = uniformized(gen, lambda);

    // march in chunks; each chunk runs a windowed uniformization sum with
    // log-space Poisson weights so large rate*time products cannot underflow
    Eigen::VectorXd y = x;
    double remaining = time;
    const double chunk = 1024.0 / lambda;
    while (remaining > 0.0) {
        const double dt = std::min(remaining, chunk);
        remaining -= dt;
        const double mean = lambda * dt;
        const int terms = poisson_terms(mean);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(y.size());
        Eigen::VectorXd power = y;
        double log_w = -mean;
        if (log_w > -700.0) acc += std::exp(log_w) * power;
        for (int k = 1; k <= terms; ++k) {
            power = P * power;
            log_w += std::log(mean / k);
            if (log_w > -700.0) acc += std::exp(log_w) * power;
        }
        y = acc;
    }
    return y;
}

JumpChain jump_chain(const Generator& gen) {
    JumpChain jc;
    jc.n_tri = gen.n_tri;
    jc.Qt.resize(gen.n_states, gen.n_states);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(gen.Q.nonZeros()));
    for (int s = 0; s < gen.n_states; ++s) {
        const double diag = gen.Q.coeff(s, s);
        if (diag == 0.0) {
            trip.emplace_back(s, s, 1.0);  // absorbing
            continue;
        }
        const double inv = 1.0 / (-diag);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.Q, s); it; ++it) {
            if (it.col() == s) continue;
            trip.emplace_back(s, static_cast<int>(it.col()), it.value() * inv);
        }
    }
    jc.Qt.setFromTriplets(trip.begin(), trip.end());
    return jc;
}

bool FlowGraph::upstream(int from, int to) const {
    if (from == to) return self_loop[static_cast<std::size_t>(from)];
    std::vector<bool> seen(successors.size(), false);
    std::deque<int> queue{from};
    seen[static_cast<std::size_t>(from)] = true;
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int nxt : successors[static_cast<std::size_t>(s)]) {
            if (nxt == to) return true;
            if (!seen[static_cast<std::size_t>(nxt)]) {
                seen[static_cast<std::size_t>(nxt)] = true;
                queue.push_back(nxt);
            }
        }
    }
    return false;
}

FlowGraph flow_graph(const JumpChain& jc) {
    FlowGraph g;
    g.n_tri = jc.n_tri;
    const int n = static_cast<int>(jc.Qt.rows());
    g.successors.resize(static_cast<std::size_t>(n));
    g.self_loop.assign(static_cast<std::size_t>(n), false);
    for (int s = 0; s < n; ++s) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(jc.Qt, s); it; ++it) {
            if (it.value() <= 0.0) continue;
            if (it.col() == s)
                g.self_loop[static_cast<std::size_t>(s)] = true;
            else
                g.successors[static_cast<std::size_t>(s)].push_back(static_cast<int>(it.col()));
        }
    }
    return g;
}

ForestCheck assert_forest(const FlowGraph& g) {
    // iterative DFS three-coloring; a back edge yields the witness cycle
    const int n = g.n_states();
    std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0 white, 1 gray, 2 black
    std::vector<int> parent(static_cast<std::size_t>(n), -1);

    for (int root = 0; root < n; ++root) {
        if (color[static_cast<std::size_t>(root)] != 0) continue;
        std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
        color[static_cast<std::size_t>(root)] = 1;
        while (!stack.empty()) {
            auto& [s, idx] = stack.back();
            const auto& succ = g.successors[static_cast<std::size_t>(s)];
            if (idx >= succ.size()) {
                color[static_cast<std::size_t>(s)] = 2;
                stack.pop_back();
                continue;
            }
            const int nxt = succ[idx++];
            if (color[static_cast<std::size_t>(nxt)] == 1) {
                // reconstruct the cycle nxt -> ... -> s -> nxt
                ForestCheck res;
                res.is_forest = false;
                std::vector<int> cyc{nxt};
                for (int w = s; w != nxt; w = parent[static_cast<std::size_t>(w)]) cyc.push_back(w);
                std::reverse(cyc.begin() + 1, cyc.end());
                cyc.push_back(nxt);
                res.witness_cycle = std::move(cyc);
                return res;
            }
            if (color[static_cast<std::size_t>(nxt)] == 0) {
                color[static_cast<std::size_t>(nxt)] = 1;
                parent[static_cast<std::size_t>(nxt)] = s;
                stack.emplace_back(nxt, 0);
            }
        }
    }
    return {true, {}};
}

Eigen::VectorXd exit_time_distribution(const Generator& gen, double time) {
    if (time < 0.0) throw InvalidInputError("exit_time_distribution: time must be non-negative");
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(gen.n_states);
    ind.head(gen.n_tri).setOnes();
    const Eigen::VectorXd phi = transition_apply(gen, time, ind);
    return phi.head(gen.n_tri).cwiseMax(0.0).cwiseMin(1.0);
}

ExitTimes expected_exit_times(const Generator& gen) {
    const int n = gen.n_states, nt = gen.n_tri;

    // states that can reach the boundary (reverse reachability from exits)
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.Q, s); it; ++it) {
            if (it.col() != s && it.value() > 0.0)
                pred[static_cast<std::size_t>(it.col())].push_back(s);
        }
    }
    std::vector<bool> reaches_exit(static_cast<std::size_t>(n), false);
    std::deque<int> queue;
    for (int s = nt; s < n; ++s) {
        reaches_exit[static_cast<std::size_t>(s)] = true;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        const int s = queue.front();
        queue.pop_front();
        for (int p : pred[static_cast<std::size_t>(s)]) {
            if (!reaches_exit[static_cast<std::size_t>(p)]) {
                reaches_exit[static_cast<std::size_t>(p)] = true;
                queue.push_back(p);
            }
        }
    }

    // a state is finite only if no path from it reaches a stranded state
    std::vector<bool> tainted(static_cast<std::size_t>(n), false);
    for (int s = 0; s < nt; ++s) {
        if (!reaches_exit[static_cast<std::size_t>(s)]) {
            tainted[static_cast<std::size_t>(s)] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {  // reverse reachability from stranded states
        const int s = queue.front();
        queue.pop_front();
        for (int p : pred[static_cast<std::size_t>(s)]) {
            if (!tainted[static_cast<std::size_t>(p)]) {
                tainted[static_cast<std::size_t>(p)] = true;
                queue.push_back(p);
            }
        }
    }

    ExitTimes res;
    res.psi = Eigen::VectorXd::Zero(nt);
    res.finite.assign(static_cast<std::size_t>(nt), true);
    std::vector<int> solve_index(static_cast<std::size_t>(nt), -1);
    std::vector<int> solve_states;
    for (int s = 0; s < nt; ++s) {
        if (tainted[static_cast<std::size_t>(s)]) {
            res.finite[static_cast<std::size_t>(s)] = false;
            res.all_finite = false;
            res.psi[s] = std::numeric_limits<double>::infinity();
            ++res.n_stranded;
        } else {
            solve_index[static_cast<std::size_t>(s)] = static_cast<int>(solve_states.size());
            solve_states.push_back(s);
        }
    }

    const int m = static_cast<int>(solve_states.size());
    if (m == 0) return res;

    // -Q restricted to the draining transient block is a nonsingular M-matrix
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m; ++i) {
        const int s = solve_states[static_cast<std::size_t>(i)];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.Q, s); it; ++it) {
            const int c = static_cast<int>(it.col());
            if (c >= nt) continue;
            const int j = solve_index[static_cast<std::size_t>(c)];
            if (j >= 0) trip.emplace_back(i, j, -it.value());
        }
    }
    Eigen::SparseMatrix<double> M(m, m);
    M.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
    if (lu.info() != Eigen::Success)
        throw NumericError("expected_exit_times: transient block factorization failed");
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
    const Eigen::VectorXd sol = lu.solve(rhs);
    const double rel = (M * sol - rhs).norm() / std::sqrt(static_cast<double>(m));
    if (!(rel < 1e-8))
        throw NumericError("expected_exit_times: transient solve residual " + std::to_string(rel));

    for (int i = 0; i < m; ++i) res.psi[solve_states[static_cast<std::size_t>(i)]] = sol[i];
    return res;
}

MonteCarloResult monte_carlo_exit(const Generator& gen, int start, std::int64_t n_particles,
                                  std::uint64_t seed, double censor_horizon) {
    if (start < 0 || start >= gen.n_states)
        throw InvalidInputError("monte_carlo_exit: start state out of range");
    if (n_particles < 1) throw InvalidInputError("monte_carlo_exit: need at least one particle");

    // cached row data for fast sampling
    std::vector<double> exit_rate(static_cast<std::size_t>(gen.n_states), 0.0);
    std::vector<std::vector<std::pair<double, int>>> cumulative(static_cast<std::size_t>(gen.n_states));
    for (int s = 0; s < gen.n_states; ++s) {
        const double rate = -gen.Q.coeff(s, s);
        exit_rate[static_cast<std::size_t>(s)] = rate;
        if (rate <= 0.0) continue;
        double acc = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.Q, s); it; ++it) {
            if (it.col() == s) continue;
            acc += it.value() / rate;
            cumulative[static_cast<std::size_t>(s)].emplace_back(acc, static_cast<int>(it.col()));
        }
    }

    MonteCarloResult res;
    res.n_particles = n_particles;
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t p = 0; p < n_particles; ++p) {
        SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(p));
        int state = start;
        double time = 0.0;
        bool censored = false;
        while (state < gen.n_tri) {
            const double rate = exit_rate[static_cast<std::size_t>(state)];
            if (rate <= 0.0) {  // stranded: no way out of this element
                time = censor_horizon;
                censored = true;
                break;
            }
            time += -std::log(rng.next_open_double()) / rate;
            if (time >= censor_horizon) {
                time = censor_horizon;
                censored = true;
                break;
            }
            const double u = rng.next_double();
            const auto& row = cumulative[static_cast<std::size_t>(state)];
            int next = row.back().second;
            for (const auto& [cum, target] : row) {
                if (u < cum) {
                    next = target;
                    break;
                }
            }
            state = next;
        }
        if (censored) ++res.n_censored;
        sum += time;
        sum_sq += time * time;
    }
    const double n = static_cast<double>(n_particles);
    res.mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * res.mean * res.mean) / std::max(1.0, n - 1.0));
    res.std_error = std::sqrt(var / n);
    return res;
}

}  // namespace fissflow
