#pragma once

#include <cstdint>
#include <vector>

#include "sbm/instance.hpp"

namespace sbm {

// Optimal fractional budgeted allocation. edge_mass is flattened in
// (request, edge) order and satisfies both constraint families to 1e-9.
// The dual prices from the final tableau certify optimality.
struct LpSolution {
    double objective = 0.0;
    std::vector<double> edge_mass;
    std::vector<double> server_price;   // dual of the capacity rows
    std::vector<double> request_price;  // dual of the assignment rows
    int pivots = 0;
};

// Non-stochastic benchmark: max sum w_s p_{s,r} m(s,r) subject to
// sum_r p m <= b_s per server and sum_s m <= 1 per request, solved by a
// dense simplex (Dantzig rule, Bland fallback after a pivot budget).
// Throws CapacityError above max_edges.
LpSolution opt_fractional(const Instance& inst, std::size_t max_edges = 2000);

// Max violation of the two constraint families (0 when feasible).
double lp_constraint_violation(const Instance& inst, const LpSolution& sol);

// Strong-duality certificate: max of dual infeasibility, dual negativity,
// and the primal-dual objective gap. Near 0 iff edge_mass is optimal.
double lp_certificate_error(const Instance& inst, const LpSolution& sol);

struct DpValue {
    double value = 0.0;
    // Optional optimal action per (request, state): -1 skip, else edge index.
    // Indexed t * n_states + state.
    std::vector<std::int8_t> actions;
    std::int64_t n_states = 0;
};

// Clairvoyant stochastic benchmark by backward induction over per-server
// success counts (mixed-radix encoded). Skipping is a legal action. Throws
// CapacityError when n_states * n_requests exceeds state_budget.
DpValue sopt_dp(const Instance& inst, bool keep_actions = false,
                std::int64_t state_budget = 10'000'000);

// Independent oracle for sopt_dp: optimal value over history-dependent
// decision trees, recursing over explicit (action, outcome) histories with
// no state merging. Only for tiny instances (<= 4 requests, <= 3 servers).
double sopt_bruteforce(const Instance& inst);

}  // namespace sbm
