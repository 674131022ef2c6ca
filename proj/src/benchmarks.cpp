#include "sbm/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sbm/errors.hpp"

namespace sbm {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTol = 1e-12;

// Dense primal simplex for max c'x, Ax <= rhs, x >= 0 with rhs >= 0 (the
// slack basis is feasible, so no phase 1). Dantzig pricing, switching to
// Bland's rule after a pivot budget to rule out cycling.
struct Simplex {
    int m, n;                          // constraints, structural variables
    std::vector<std::vector<double>> tab;  // m rows over n + m columns
    std::vector<double> rhs;
    std::vector<double> cost;          // reduced costs, length n + m
    std::vector<int> basis;
    double objective = 0.0;
    int pivots = 0;

    Simplex(int m_, int n_) : m(m_), n(n_), tab(m_, std::vector<double>(n_ + m_, 0.0)),
                              rhs(m_, 0.0), cost(n_ + m_, 0.0), basis(m_) {
        for (int i = 0; i < m; ++i) {
            tab[i][n + i] = 1.0;
            basis[i] = n + i;
        }
    }

    int entering_dantzig() const {
        int best = -1;
        double best_cost = kPivotTol;
        for (int j = 0; j < n + m; ++j)
            if (cost[j] > best_cost) {
                best_cost = cost[j];
                best = j;
            }
        return best;
    }

    int entering_bland() const {
        for (int j = 0; j < n + m; ++j)
            if (cost[j] > kPivotTol) return j;
        return -1;
    }

    // leaving row by min ratio; ties to the smallest basis index
    int leaving(int col) const {
        int row = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (tab[i][col] <= kRatioTol) continue;
            const double ratio = rhs[i] / tab[i][col];
            if (ratio < best - kRatioTol ||
                (ratio < best + kRatioTol && (row < 0 || basis[i] < basis[row]))) {
                best = ratio;
                row = i;
            }
        }
        return row;
    }

    void pivot(int row, int col) {
        const double piv = tab[row][col];
        for (double& v : tab[row]) v /= piv;
        rhs[row] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double factor = tab[i][col];
            if (factor == 0.0) continue;
            for (int j = 0; j < n + m; ++j) tab[i][j] -= factor * tab[row][j];
            rhs[i] -= factor * rhs[row];
            if (rhs[i] < 0.0 && rhs[i] > -1e-11) rhs[i] = 0.0;
        }
        const double cfactor = cost[col];
        if (cfactor != 0.0) {
            for (int j = 0; j < n + m; ++j) cost[j] -= cfactor * tab[row][j];
            objective += cfactor * rhs[row];
        }
        basis[row] = col;
        ++pivots;
    }

    void solve() {
        const int budget = 20 * (n + m);
        const int hard_cap = 200 * (n + m) + 100000;
        while (true) {
            const int col = pivots < budget ? entering_dantzig() : entering_bland();
            if (col < 0) return;
            const int row = leaving(col);
            if (row < 0)
                throw CapacityError("opt_fractional: LP unbounded (corrupt instance?)");
            pivot(row, col);
            if (pivots > hard_cap)
                throw CapacityError("opt_fractional: pivot limit exceeded");
        }
    }
};

}  // namespace

LpSolution opt_fractional(const Instance& inst, std::size_t max_edges) {
    if (inst.n_edges() > max_edges)
        throw CapacityError("opt_fractional: instance exceeds LP size limit");

    const int n_vars = static_cast<int>(inst.n_edges());
    const int m_rows = inst.n_servers() + inst.n_requests();
    Simplex lp(m_rows, n_vars);

    int col = 0;
    for (const Request& r : inst.requests()) {
        for (const Edge& e : r.edges) {
            const Server& s = inst.servers()[e.server];
            lp.tab[e.server][col] = e.probability;              // capacity row
            lp.tab[inst.n_servers() + r.id][col] = 1.0;         // assignment row
            lp.cost[col] = e.probability * s.weight;
            ++col;
        }
    }
    for (const Server& s : inst.servers()) lp.rhs[s.id] = static_cast<double>(s.capacity);
    for (int r = 0; r < inst.n_requests(); ++r) lp.rhs[inst.n_servers() + r] = 1.0;

    lp.solve();

    LpSolution sol;
    sol.objective = lp.objective;
    sol.pivots = lp.pivots;
    sol.edge_mass.assign(n_vars, 0.0);
    for (int i = 0; i < m_rows; ++i)
        if (lp.basis[i] < n_vars) sol.edge_mass[lp.basis[i]] = std::max(0.0, lp.rhs[i]);
    // dual prices: negated reduced costs of the slack columns
    sol.server_price.resize(inst.n_servers());
    for (int s = 0; s < inst.n_servers(); ++s)
        sol.server_price[s] = std::max(0.0, -lp.cost[n_vars + s]);
    sol.request_price.resize(inst.n_requests());
    for (int r = 0; r < inst.n_requests(); ++r)
        sol.request_price[r] = std::max(0.0, -lp.cost[n_vars + inst.n_servers() + r]);
    return sol;
}

double lp_certificate_error(const Instance& inst, const LpSolution& sol) {
    double worst = lp_constraint_violation(inst, sol);
    double dual_value = 0.0;
    for (const Server& s : inst.servers())
        dual_value += s.capacity * sol.server_price[s.id];
    for (int r = 0; r < inst.n_requests(); ++r) dual_value += sol.request_price[r];
    worst = std::max(worst, std::abs(dual_value - sol.objective));
    for (const Request& r : inst.requests())
        for (const Edge& e : r.edges) {
            const Server& s = inst.servers()[e.server];
            const double slack = e.probability * sol.server_price[e.server] +
                                 sol.request_price[r.id] - e.probability * s.weight;
            worst = std::max(worst, -slack);
        }
    return worst;
}

double lp_constraint_violation(const Instance& inst, const LpSolution& sol) {
    double worst = 0.0;
    std::vector<double> server_mass(inst.n_servers(), 0.0);
    std::size_t idx = 0;
    for (const Request& r : inst.requests()) {
        double request_mass = 0.0;
        for (const Edge& e : r.edges) {
            const double m = sol.edge_mass[idx++];
            worst = std::max(worst, -m);
            server_mass[e.server] += e.probability * m;
            request_mass += m;
        }
        worst = std::max(worst, request_mass - 1.0);
    }
    for (const Server& s : inst.servers())
        worst = std::max(worst, server_mass[s.id] - s.capacity);
    return worst;
}

DpValue sopt_dp(const Instance& inst, bool keep_actions, std::int64_t state_budget) {
    std::int64_t n_states = 1;
    for (const Server& s : inst.servers()) {
        n_states *= s.capacity + 1;
        if (n_states > state_budget)
            throw CapacityError("sopt_dp: state space exceeds budget");
    }
    const std::int64_t T = inst.n_requests();
    if (n_states * std::max<std::int64_t>(T, 1) > state_budget)
        throw CapacityError("sopt_dp: state space times horizon exceeds budget");

    std::vector<std::int64_t> stride(inst.n_servers());
    std::int64_t acc = 1;
    for (int s = 0; s < inst.n_servers(); ++s) {
        stride[s] = acc;
        acc *= inst.servers()[s].capacity + 1;
    }

    DpValue result;
    result.n_states = n_states;
    if (keep_actions) result.actions.assign(static_cast<std::size_t>(n_states) * T, -1);

    std::vector<double> next(n_states, 0.0);
    std::vector<double> cur(n_states, 0.0);
    for (std::int64_t t = T - 1; t >= 0; --t) {
        const Request& r = inst.requests()[static_cast<std::size_t>(t)];
        for (std::int64_t state = 0; state < n_states; ++state) {
            double best = next[state];  // skip
            std::int8_t best_action = -1;
            for (std::size_t ei = 0; ei < r.edges.size(); ++ei) {
                const Edge& e = r.edges[ei];
                const Server& s = inst.servers()[e.server];
                const std::int64_t count = (state / stride[e.server]) % (s.capacity + 1);
                if (count >= s.capacity) continue;
                const double value =
                    e.probability * (s.weight + next[state + stride[e.server]]) +
                    (1.0 - e.probability) * next[state];
                if (value > best) {
                    best = value;
                    best_action = static_cast<std::int8_t>(ei);
                }
            }
            cur[state] = best;
            if (keep_actions)
                result.actions[static_cast<std::size_t>(t) * n_states + state] = best_action;
        }
        std::swap(cur, next);
    }
    result.value = next[0];
    return result;
}

namespace {

// Value of the best decision tree from an explicit history of
// (edge index or -1, success) pairs. Feasibility is recomputed by replaying
// the history, so no two histories share state.
double best_from_history(const Instance& inst,
                         std::vector<std::pair<int, bool>>& history) {
    const std::size_t t = history.size();
    if (t == inst.requests().size()) return 0.0;

    std::vector<int> counts(inst.n_servers(), 0);
    for (std::size_t i = 0; i < t; ++i) {
        if (history[i].first < 0 || !history[i].second) continue;
        counts[inst.requests()[i].edges[history[i].first].server] += 1;
    }

    const Request& r = inst.requests()[t];
    history.push_back({-1, false});
    double best = best_from_history(inst, history);  // skip
    history.pop_back();

    for (std::size_t ei = 0; ei < r.edges.size(); ++ei) {
        const Edge& e = r.edges[ei];
        const Server& s = inst.servers()[e.server];
        if (counts[e.server] >= s.capacity) continue;
        history.push_back({static_cast<int>(ei), true});
        const double on_success = s.weight + best_from_history(inst, history);
        history.back().second = false;
        const double on_failure = best_from_history(inst, history);
        history.pop_back();
        best = std::max(best, e.probability * on_success + (1.0 - e.probability) * on_failure);
    }
    return best;
}

}  // namespace

double sopt_bruteforce(const Instance& inst) {
    if (inst.n_requests() > 4 || inst.n_servers() > 3)
        throw CapacityError("sopt_bruteforce: only for <= 4 requests and <= 3 servers");
    std::vector<std::pair<int, bool>> history;
    return best_from_history(inst, history);
}

}  // namespace sbm
