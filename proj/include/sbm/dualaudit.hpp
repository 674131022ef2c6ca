#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbm/engine.hpp"
#include "sbm/instance.hpp"

namespace sbm {

// Primal-dual accounting of one balance run. On each assignment of r to s
// with load l (before) the ledger sets m(s,r) = 1, adds w p f_s(l)/(b_s c)
// to x(s), sets y(r) = w p (1 - f_s(l))/c, and accrues P by w p (expected
// reward, matching the LP objective) and D by b_s dx + y(r). The identity
// P = c D holds after every step to 1e-12 relative.
struct DualLedger {
    double c = 0.0;                 // 1 - 1/e
    std::vector<double> xhat;       // per server, >= 0 throughout
    std::vector<double> yhat;       // per request, set once at assignment
    double primal = 0.0;            // P
    double dual = 0.0;              // D = sum b_s xhat(s) + sum yhat(r)
    double max_rel_residual = 0.0;  // max over steps of |P - c D| / (1 + P)
};

inline constexpr double kLedgerTolerance = 1e-12;

// Pure fold of the update rules over the trace's assignments. Throws
// AccountingError if the per-step identity exceeds tolerance.
DualLedger audit_trace(const Instance& inst, const Trace& trace);

struct AuditedRun {
    Trace trace;
    DualLedger ledger;
};

// One balance run instrumented with the dual updates.
AuditedRun audited_run(const Instance& inst, OutcomeOracle& oracle);

struct EdgeSlack {
    int request = 0;
    int server = 0;
    double estimate = 0.0;  // mean over runs of p x(s) + y(r)
    double ci95 = 0.0;
    double target = 0.0;    // p w_s
    double ratio = 0.0;     // estimate / target
};

struct SlackEstimate {
    std::int64_t trials = 0;
    std::vector<EdgeSlack> edges;
    double min_ratio = 0.0;
    double min_ratio_ci95 = 0.0;  // ci of the minimizing edge, in ratio units
    double max_rel_residual = 0.0;
};

// Dual feasibility slack per edge, estimated over independent audited runs.
// Trial t uses the stream of (seed, t); worker count never changes the result.
SlackEstimate estimate_slack(const Instance& inst, std::int64_t trials, std::uint64_t seed,
                             int workers = 0);

// Instance family for feasibility sweeps. gnb scales uniform capacities;
// hetero scales a fixed heterogeneous profile of capacities (x1, x3, x10),
// weights in [0.5, 2] and per-edge probabilities, so the sweep value is the
// minimum capacity.
struct FamilySpec {
    enum class Kind { gnb, hetero };
    Kind kind = Kind::gnb;
    int n = 3;
    double p = 0.1;
};

Instance make_family_instance(const FamilySpec& spec, int b);

struct EpsilonPoint {
    int b = 0;
    double min_ratio = 0.0;
    double ci95 = 0.0;
    double max_rel_residual = 0.0;
};

// Min slack ratio per capacity scale; non-decreasing in b up to noise, and
// approaching 1 as capacities grow.
std::vector<EpsilonPoint> epsilon_curve(std::span<const int> b_list, const FamilySpec& spec,
                                        std::int64_t trials, std::uint64_t seed,
                                        int workers = 0);

}  // namespace sbm
