#pragma once

#include <cstdint>
#include <vector>

#include "sbm/analysis.hpp"
#include "sbm/instance.hpp"
#include "sbm/policy.hpp"
#include "sbm/rng.hpp"

namespace sbm {

// Source of assignment outcomes. Lazy mode consumes one Bernoulli draw per
// assignment in arrival order. Pre-drawn mode fixes one outcome per
// (request, edge) pair up front, so every policy sees the same realized
// outcome vector no matter which edges it actually queries.
class OutcomeOracle {
public:
    static OutcomeOracle lazy(std::uint64_t seed);
    static OutcomeOracle lazy_stream(SplitMix64 stream);
    static OutcomeOracle predrawn(const Instance& inst, std::uint64_t seed);

    // Outcome of assigning request `request` along its edge_index-th edge.
    bool draw(int request, int edge_index, double probability);

    bool is_predrawn() const { return predrawn_; }
    // Pre-drawn outcomes, indexed by offsets()[request] + edge_index.
    // Mutable so tests can force outcome vectors (e.g. all edges of one
    // server failing).
    std::vector<std::uint8_t>& table() { return table_; }
    const std::vector<std::size_t>& offsets() const { return offsets_; }

private:
    explicit OutcomeOracle(SplitMix64 stream) : stream_(stream) {}

    SplitMix64 stream_;
    bool predrawn_ = false;
    std::vector<std::uint8_t> table_;
    std::vector<std::size_t> offsets_;
};

struct TraceStep {
    int server = -1;            // -1 = unassigned
    bool success = false;
    double load_before = 0.0;   // load of the chosen server before assignment
};

// Full record of one run; replaying it against the instance reproduces the
// final states exactly.
struct Trace {
    static constexpr int kUnassigned = -1;

    std::vector<TraceStep> steps;          // one per request, arrival order
    std::vector<ServerState> final_states;
    double matched_weight = 0.0;           // sum of w_s over successes
};

// Presents requests in arrival order, samples outcomes, enforces capacities.
// Throws ContractViolationError if the policy returns a full or non-adjacent
// server.
Trace run_online(const Instance& inst, const Policy& policy, OutcomeOracle& oracle);

struct ReplayResult {
    std::vector<ServerState> final_states;
    double matched_weight = 0.0;
};

// Recomputes final states from the recorded steps.
ReplayResult replay(const Instance& inst, const Trace& trace);

struct Stats {
    std::int64_t trials = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance
    double ci95 = 0.0;      // 1.96 * sqrt(variance / trials)
    std::vector<double> server_mean_successes;
};

// Monte Carlo estimate of the expected matched weight. Trial t draws its
// outcome stream from (seed, t), so the result is a pure function of
// (instance, policy, trials, seed); `workers` only changes wall time.
// workers = 0 uses all cores.
Stats monte_carlo(const Instance& inst, const Policy& policy, std::int64_t trials,
                  std::uint64_t seed, int workers = 0);

// Serial reference for the kernel above; kept for testing and benchmarking.
// Produces bit-identical Stats.
Stats monte_carlo_serial(const Instance& inst, const Policy& policy, std::int64_t trials,
                         std::uint64_t seed);

// Empirical pmf of the number of matches per round on a gen_gnb instance.
std::vector<DistributionTable> round_successes(const Instance& inst, const Policy& policy,
                                               std::int64_t trials, std::uint64_t seed,
                                               int workers = 0);

// Deterministic helpers shared by the aggregation paths.
int resolve_workers(int requested);
double pairwise_sum(std::span<const double> values);

}  // namespace sbm
