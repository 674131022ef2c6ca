#include "sbm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbm/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sbm {

OutcomeOracle OutcomeOracle::lazy(std::uint64_t seed) {
    return OutcomeOracle(SplitMix64(seed));
}

OutcomeOracle OutcomeOracle::lazy_stream(SplitMix64 stream) { return OutcomeOracle(stream); }

OutcomeOracle OutcomeOracle::predrawn(const Instance& inst, std::uint64_t seed) {
    OutcomeOracle oracle{SplitMix64(seed)};
    oracle.predrawn_ = true;
    oracle.offsets_.reserve(inst.n_requests() + 1);
    oracle.offsets_.push_back(0);
    for (const Request& r : inst.requests())
        oracle.offsets_.push_back(oracle.offsets_.back() + r.edges.size());
    oracle.table_.resize(oracle.offsets_.back());
    // fixed draw order (request asc, edge asc): one Bernoulli per edge pair,
    // independent of what any policy later queries
    std::size_t i = 0;
    for (const Request& r : inst.requests())
        for (const Edge& e : r.edges)
            oracle.table_[i++] = oracle.stream_.bernoulli(e.probability) ? 1 : 0;
    return oracle;
}

bool OutcomeOracle::draw(int request, int edge_index, double probability) {
    if (predrawn_) return table_[offsets_[request] + edge_index] != 0;
    return stream_.bernoulli(probability);
}

Trace run_online(const Instance& inst, const Policy& policy, OutcomeOracle& oracle) {
    std::vector<ServerState> states(inst.n_servers());
    for (const Server& s : inst.servers()) states[s.id] = {0.0, 0, s.capacity, s.weight};

    Trace trace;
    trace.steps.resize(inst.n_requests());
    for (const Request& r : inst.requests()) {
        const auto sel = policy.select(r, states);
        if (!sel) continue;

        const int s = *sel;
        const auto it = std::find_if(r.edges.begin(), r.edges.end(),
                                     [s](const Edge& e) { return e.server == s; });
        if (it == r.edges.end())
            throw ContractViolationError("policy selected a non-adjacent server");
        if (states[s].full())
            throw ContractViolationError("policy selected a full server");

        TraceStep& step = trace.steps[r.id];
        step.server = s;
        step.load_before = states[s].load;
        states[s].load += it->probability;
        const int edge_index = static_cast<int>(it - r.edges.begin());
        step.success = oracle.draw(r.id, edge_index, it->probability);
        if (step.success) {
            states[s].successes += 1;
            trace.matched_weight += states[s].weight;
        }
    }
    trace.final_states = std::move(states);
    return trace;
}

ReplayResult replay(const Instance& inst, const Trace& trace) {
    ReplayResult result;
    result.final_states.resize(inst.n_servers());
    for (const Server& s : inst.servers()) result.final_states[s.id] = {0.0, 0, s.capacity, s.weight};
    for (const Request& r : inst.requests()) {
        const TraceStep& step = trace.steps[r.id];
        if (step.server == Trace::kUnassigned) continue;
        ServerState& st = result.final_states[step.server];
        const auto it = std::find_if(r.edges.begin(), r.edges.end(),
                                     [&step](const Edge& e) { return e.server == step.server; });
        if (it == r.edges.end()) throw ContractViolationError("trace step has no matching edge");
        st.load += it->probability;
        if (step.success) {
            st.successes += 1;
            result.matched_weight += st.weight;
        }
    }
    return result;
}

int resolve_workers(int requested) {
#ifdef _OPENMP
    if (requested <= 0) return omp_get_max_threads();
    return requested;
#else
    (void)requested;
    return 1;
#endif
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

double run_trial(const Instance& inst, const Policy& policy, std::uint64_t seed,
                 std::int64_t trial, std::vector<std::uint64_t>& success_sums) {
    OutcomeOracle oracle = OutcomeOracle::lazy_stream(SplitMix64::derive(seed, trial));
    const Trace trace = run_online(inst, policy, oracle);
    for (int s = 0; s < inst.n_servers(); ++s)
        success_sums[s] += static_cast<std::uint64_t>(trace.final_states[s].successes);
    return trace.matched_weight;
}

// Per-trial values live in slots and the reduction order is fixed, so the
// result is independent of scheduling. Success counts are integers and sum
// exactly in any order.
Stats finalize_stats(const Instance& inst, std::vector<double>& values,
                     const std::vector<std::uint64_t>& success_sums) {
    Stats stats;
    stats.trials = static_cast<std::int64_t>(values.size());
    stats.mean = pairwise_sum(values) / static_cast<double>(stats.trials);
    if (stats.trials > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d = values[i] - stats.mean;
            sq[i] = d * d;
        }
        stats.variance = pairwise_sum(sq) / static_cast<double>(stats.trials - 1);
    }
    stats.ci95 = 1.96 * std::sqrt(stats.variance / static_cast<double>(stats.trials));
    stats.server_mean_successes.resize(inst.n_servers());
    for (int s = 0; s < inst.n_servers(); ++s)
        stats.server_mean_successes[s] =
            static_cast<double>(success_sums[s]) / static_cast<double>(stats.trials);
    return stats;
}

}  // namespace

Stats monte_carlo_serial(const Instance& inst, const Policy& policy, std::int64_t trials,
                         std::uint64_t seed) {
    if (trials < 1) throw InvalidParameterError("monte_carlo: trials must be >= 1");
    std::vector<double> values(trials);
    std::vector<std::uint64_t> success_sums(inst.n_servers(), 0);
    for (std::int64_t t = 0; t < trials; ++t)
        values[t] = run_trial(inst, policy, seed, t, success_sums);
    return finalize_stats(inst, values, success_sums);
}

Stats monte_carlo(const Instance& inst, const Policy& policy, std::int64_t trials,
                  std::uint64_t seed, int workers) {
    if (trials < 1) throw InvalidParameterError("monte_carlo: trials must be >= 1");
    const int n_workers = resolve_workers(workers);
    if (n_workers == 1) return monte_carlo_serial(inst, policy, trials, seed);

    std::vector<double> values(trials);
    std::vector<std::uint64_t> success_sums(inst.n_servers(), 0);
#ifdef _OPENMP
#pragma omp parallel num_threads(n_workers)
    {
        std::vector<std::uint64_t> local_sums(inst.n_servers(), 0);
#pragma omp for schedule(dynamic, 16) nowait
        for (std::int64_t t = 0; t < trials; ++t)
            values[t] = run_trial(inst, policy, seed, t, local_sums);
#pragma omp critical(sbm_mc_merge)
        for (int s = 0; s < inst.n_servers(); ++s) success_sums[s] += local_sums[s];
    }
#else
    for (std::int64_t t = 0; t < trials; ++t)
        values[t] = run_trial(inst, policy, seed, t, success_sums);
#endif
    return finalize_stats(inst, values, success_sums);
}

std::vector<DistributionTable> round_successes(const Instance& inst, const Policy& policy,
                                               std::int64_t trials, std::uint64_t seed,
                                               int workers) {
    if (inst.metadata().generator != "gnb")
        throw InvalidParameterError("round_successes: instance was not produced by gen_gnb");
    if (trials < 1) throw InvalidParameterError("round_successes: trials must be >= 1");

    const int n = static_cast<int>(inst.param("n"));
    const auto round_size = static_cast<std::int64_t>(inst.param("round_size"));
    const auto max_per_round = inst.total_capacity();  // matches cannot exceed total capacity
    const std::size_t support = static_cast<std::size_t>(max_per_round) + 1;

    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) * support, 0);
    const auto count_trial = [&](std::int64_t t, std::vector<std::uint64_t>& sink) {
        OutcomeOracle oracle = OutcomeOracle::lazy_stream(SplitMix64::derive(seed, t));
        const Trace trace = run_online(inst, policy, oracle);
        for (int round = 0; round < n; ++round) {
            std::int64_t matches = 0;
            for (std::int64_t r = round * round_size; r < (round + 1) * round_size; ++r)
                matches += trace.steps[r].success ? 1 : 0;
            sink[static_cast<std::size_t>(round) * support + matches] += 1;
        }
    };

    const int n_workers = resolve_workers(workers);
#ifdef _OPENMP
    if (n_workers > 1) {
#pragma omp parallel num_threads(n_workers)
        {
            std::vector<std::uint64_t> local(counts.size(), 0);
#pragma omp for schedule(dynamic, 16) nowait
            for (std::int64_t t = 0; t < trials; ++t) count_trial(t, local);
#pragma omp critical(sbm_round_merge)
            for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
        }
    } else
#endif
    {
        for (std::int64_t t = 0; t < trials; ++t) count_trial(t, counts);
    }

    std::vector<DistributionTable> tables(n);
    for (int round = 0; round < n; ++round) {
        tables[round].masses.resize(support);
        for (std::size_t k = 0; k < support; ++k)
            tables[round].masses[k] =
                static_cast<double>(counts[static_cast<std::size_t>(round) * support + k]) /
                static_cast<double>(trials);
    }
    return tables;
}

}  // namespace sbm
