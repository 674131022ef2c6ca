#include "sbm/dualaudit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbm/errors.hpp"
#include "sbm/policy.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sbm {

namespace {

// Compensated accumulator; keeps the per-step identity check meaningful on
// long runs instead of drowning it in summation-order noise.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double edge_probability(const Request& r, int server) {
    for (const Edge& e : r.edges)
        if (e.server == server) return e.probability;
    throw ContractViolationError("trace references a non-adjacent server");
}

}  // namespace

DualLedger audit_trace(const Instance& inst, const Trace& trace) {
    DualLedger ledger;
    ledger.c = kBalanceRate;
    ledger.xhat.assign(inst.n_servers(), 0.0);
    ledger.yhat.assign(inst.n_requests(), 0.0);

    Kahan primal, dual;
    for (const Request& r : inst.requests()) {
        const TraceStep& step = trace.steps[r.id];
        if (step.server == Trace::kUnassigned) continue;
        const Server& s = inst.servers()[step.server];
        const double p = edge_probability(r, step.server);
        const double f = potential(step.load_before, s.capacity);

        const double dx = s.weight * p * f / (s.capacity * ledger.c);
        ledger.xhat[step.server] += dx;
        ledger.yhat[r.id] = s.weight * p * (1.0 - f) / ledger.c;

        primal.add(s.weight * p);  // P accrues on assignment, like m(s,r)
        dual.add(s.capacity * dx + ledger.yhat[r.id]);

        const double residual =
            std::abs(primal.sum - ledger.c * dual.sum) / (1.0 + primal.sum);
        ledger.max_rel_residual = std::max(ledger.max_rel_residual, residual);
        if (residual > kLedgerTolerance)
            throw AccountingError("dual ledger identity broke at request " +
                                  std::to_string(r.id) + ", residual " +
                                  std::to_string(residual));
    }
    ledger.primal = primal.sum;
    ledger.dual = dual.sum;
    return ledger;
}

AuditedRun audited_run(const Instance& inst, OutcomeOracle& oracle) {
    StochasticBalancePolicy policy;
    AuditedRun run;
    run.trace = run_online(inst, policy, oracle);
    run.ledger = audit_trace(inst, run.trace);
    return run;
}

SlackEstimate estimate_slack(const Instance& inst, std::int64_t trials, std::uint64_t seed,
                             int workers) {
    if (trials < 1) throw InvalidParameterError("estimate_slack: trials must be >= 1");

    const std::size_t n_edges = inst.n_edges();
    SlackEstimate est;
    est.trials = trials;
    if (n_edges == 0) return est;

    // Fixed-size blocks, each folded serially in trial order, then reduced in
    // block order: results never depend on the worker count.
    constexpr std::int64_t kBlock = 256;
    const std::int64_t n_blocks = (trials + kBlock - 1) / kBlock;
    std::vector<double> sums(static_cast<std::size_t>(n_blocks) * n_edges, 0.0);
    std::vector<double> sqs(static_cast<std::size_t>(n_blocks) * n_edges, 0.0);
    std::vector<double> residuals(n_blocks, 0.0);

    const auto run_block = [&](std::int64_t block) {
        double* bsum = sums.data() + static_cast<std::size_t>(block) * n_edges;
        double* bsq = sqs.data() + static_cast<std::size_t>(block) * n_edges;
        const std::int64_t lo = block * kBlock;
        const std::int64_t hi = std::min(trials, lo + kBlock);
        for (std::int64_t t = lo; t < hi; ++t) {
            OutcomeOracle oracle = OutcomeOracle::lazy_stream(SplitMix64::derive(seed, t));
            const AuditedRun run = audited_run(inst, oracle);
            residuals[block] = std::max(residuals[block], run.ledger.max_rel_residual);
            std::size_t idx = 0;
            for (const Request& r : inst.requests()) {
                for (const Edge& e : r.edges) {
                    const double v =
                        e.probability * run.ledger.xhat[e.server] + run.ledger.yhat[r.id];
                    bsum[idx] += v;
                    bsq[idx] += v * v;
                    ++idx;
                }
            }
        }
    };

    const int n_workers = resolve_workers(workers);
#ifdef _OPENMP
    if (n_workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(n_workers)
        for (std::int64_t block = 0; block < n_blocks; ++block) run_block(block);
    } else
#endif
    {
        for (std::int64_t block = 0; block < n_blocks; ++block) run_block(block);
    }

    est.edges.resize(n_edges);
    est.min_ratio = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (const Request& r : inst.requests()) {
        for (const Edge& e : r.edges) {
            double sum = 0.0, sq = 0.0;
            for (std::int64_t block = 0; block < n_blocks; ++block) {
                sum += sums[static_cast<std::size_t>(block) * n_edges + idx];
                sq += sqs[static_cast<std::size_t>(block) * n_edges + idx];
            }
            EdgeSlack& slack = est.edges[idx];
            slack.request = r.id;
            slack.server = e.server;
            slack.estimate = sum / static_cast<double>(trials);
            const double var =
                trials > 1
                    ? std::max(0.0, (sq - static_cast<double>(trials) * slack.estimate *
                                              slack.estimate) /
                                        static_cast<double>(trials - 1))
                    : 0.0;
            slack.ci95 = 1.96 * std::sqrt(var / static_cast<double>(trials));
            slack.target = e.probability * inst.servers()[e.server].weight;
            slack.ratio = slack.estimate / slack.target;
            if (slack.ratio < est.min_ratio) {
                est.min_ratio = slack.ratio;
                est.min_ratio_ci95 = slack.ci95 / slack.target;
            }
            ++idx;
        }
    }
    for (std::int64_t block = 0; block < n_blocks; ++block)
        est.max_rel_residual = std::max(est.max_rel_residual, residuals[block]);
    return est;
}

Instance make_family_instance(const FamilySpec& spec, int b) {
    if (b < 1) throw InvalidParameterError("make_family_instance: b must be >= 1");
    if (spec.kind == FamilySpec::Kind::gnb) return gen_gnb(spec.n, b, spec.p);

    // Heterogeneous counterpart of G_n^b: capacities b x {1,3,10}, weights in
    // [0.5, 2], per-edge probabilities spread around the base p. Round i is
    // adjacent to servers i..n and carries enough mass to add one average
    // remaining capacity per survivor, mirroring the uniform family.
    const int n = spec.n;
    if (n < 1) throw InvalidParameterError("make_family_instance: n must be >= 1");
    const double p = spec.p;
    if (!(p > 0.0) || p > 0.8)
        throw InvalidParameterError("make_family_instance: hetero base p must lie in (0, 0.8]");

    constexpr int kCapFactor[3] = {1, 3, 10};
    constexpr double kWeight[3] = {2.0, 0.5, 1.25};
    constexpr double kProbFactor[3] = {0.8, 1.0, 1.2};

    std::vector<Server> servers(n);
    for (int s = 0; s < n; ++s)
        servers[s] = {s, b * kCapFactor[s % 3], kWeight[s % 3]};

    std::vector<Request> requests;
    int id = 0;
    for (int round = 1; round <= n; ++round) {
        double remaining = 0.0;
        for (int s = round - 1; s < n; ++s) remaining += servers[s].capacity;
        const auto round_size = static_cast<std::int64_t>(
            std::ceil(remaining / (p * (n - round + 1))));
        for (std::int64_t i = 0; i < round_size; ++i) {
            Request r{id, {}};
            for (int s = round - 1; s < n; ++s)
                r.edges.push_back({s, std::min(1.0, p * kProbFactor[(s + id) % 3])});
            requests.push_back(std::move(r));
            ++id;
        }
    }

    Metadata meta;
    meta.generator = "hetero";
    meta.params["n"] = std::to_string(n);
    meta.params["b"] = std::to_string(b);
    meta.params["p"] = format_double(p);
    return Instance(std::move(servers), std::move(requests), std::move(meta));
}

std::vector<EpsilonPoint> epsilon_curve(std::span<const int> b_list, const FamilySpec& spec,
                                        std::int64_t trials, std::uint64_t seed, int workers) {
    std::vector<EpsilonPoint> curve;
    curve.reserve(b_list.size());
    for (int b : b_list) {
        const Instance inst = make_family_instance(spec, b);
        const SlackEstimate est = estimate_slack(
            inst, trials, SplitMix64::derive_key(seed, static_cast<std::uint64_t>(b)), workers);
        curve.push_back({b, est.min_ratio, est.min_ratio_ci95, est.max_rel_residual});
    }
    return curve;
}

}  // namespace sbm
