// Acceptance suite: one self-contained check per criterion, one pass/fail
// line each. Exit code 0 only when every criterion holds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sbm/analysis.hpp"
#include "sbm/benchmarks.hpp"
#include "sbm/dualaudit.hpp"
#include "sbm/engine.hpp"
#include "sbm/experiments.hpp"
#include "sbm/instance.hpp"
#include "sbm/policy.hpp"
#include "sbm/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) {
        detail += (detail.empty() ? "" : "; ") + what;
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// criterion 1: recurrence vs closed form, n <= 30, 1e-9
Outcome criterion_formula_cross_validation() {
    Outcome out;
    double max_diff = 0.0;
    for (int n = 0; n <= 30; ++n)
        for (int m = 0; m <= n; ++m)
            max_diff = std::max(max_diff, std::abs(sbm::greedy_expect_recurrence(n, m) -
                                                   sbm::greedy_expect_closed(n, m)));
    out.require(max_diff < 1e-9, "max diff " + num(max_diff) + " >= 1e-9");
    out.note("max_diff=" + num(max_diff));
    return out;
}

// criterion 2: greedy simulation vs closed form within 3 ci + 0.01 n
Outcome criterion_greedy_vs_closed() {
    Outcome out;
    sbm::GreedyPolicy greedy;
    for (int n : {1, 2, 3, 5, 8}) {
        const sbm::Instance inst = sbm::gen_gnb(n, 1, 0.01);
        const sbm::Stats stats = sbm::monte_carlo(inst, greedy, 100000, 2);
        const double closed = sbm::greedy_expect_closed(n, n);
        const double diff = std::abs(stats.mean - closed);
        const double allowance = 3.0 * stats.ci95 + 0.01 * n;
        out.require(diff <= allowance, "n=" + std::to_string(n) + " diff " + num(diff) +
                                           " > " + num(allowance));
    }
    return out;
}

// criterion 3: empirical round-1 pmf vs round_dist, TV < 0.02
Outcome criterion_round_distribution() {
    Outcome out;
    sbm::StochasticBalancePolicy sbal;
    for (int b : {1, 3}) {
        const sbm::Instance inst = sbm::gen_gnb(1, b, 0.01);
        const auto empirical = sbm::round_successes(inst, sbal, 100000, 3);
        const double tv = sbm::total_variation(empirical[0], sbm::round_dist(b, b));
        out.require(tv < 0.02, "b=" + std::to_string(b) + " TV " + num(tv) + " >= 0.02");
        out.note("tv(b=" + std::to_string(b) + ")=" + num(tv));
    }
    return out;
}

// criterion 4: E[SBal] below the aggregate bound
Outcome criterion_sbal_bound() {
    Outcome out;
    sbm::StochasticBalancePolicy sbal;
    const std::pair<int, int> cases[] = {{10, 1}, {10, 3}, {20, 1}};
    for (const auto& [n, b] : cases) {
        const sbm::Instance inst = sbm::gen_gnb(n, b, 0.01);
        const sbm::Stats stats = sbm::monte_carlo(inst, sbal, 10000, 4);
        const double bound = sbm::sbal_total_bound(n, b).aggregate;
        out.require(stats.mean <= bound + 3.0 * stats.ci95,
                    "(" + std::to_string(n) + "," + std::to_string(b) + ") mean " +
                        num(stats.mean) + " > bound " + num(bound));
        out.note("(" + std::to_string(n) + "," + std::to_string(b) + ")=" + num(stats.mean) +
                 "<=" + num(bound));
    }
    return out;
}

// criterion 5: convergence ratio decreasing, n=200 near 1 - 1/e
Outcome criterion_convergence() {
    Outcome out;
    const auto rows = sbm::convergence_table({25, 50, 100, 200}, 1, 0.01, 10000, 5);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double allowance = rows[i].ratio_ub_ci95 + rows[i + 1].ratio_ub_ci95;
        out.require(rows[i + 1].ratio_ub <= rows[i].ratio_ub + allowance,
                    "ratio rose from n=" + std::to_string(rows[i].n) + " to n=" +
                        std::to_string(rows[i + 1].n));
    }
    const double limit = 1.0 - std::exp(-1.0);
    const double final_ratio = rows.back().ratio_ub;
    out.require(final_ratio >= limit - 0.01 && final_ratio <= limit + 0.05,
                "n=200 ratio " + num(final_ratio) + " outside [" + num(limit - 0.01) + "," +
                    num(limit + 0.05) + "]");
    std::string series;
    for (const auto& row : rows) series += (series.empty() ? "" : ",") + num(row.ratio_ub);
    out.note("ratios=" + series);
    return out;
}

// criterion 6: benchmark ordering and oracle agreement on tiny instances
Outcome criterion_benchmark_ordering() {
    Outcome out;
    int checked_bruteforce = 0;
    double max_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        sbm::SplitMix64 rng(seed);
        sbm::RandomSpec spec;
        spec.n_servers = 1 + static_cast<int>(rng.next_range(0, 2));
        spec.n_requests = 1 + static_cast<int>(rng.next_range(0, 4));
        spec.edge_density = 0.8;
        spec.p_range = {0.05, 1.0};
        spec.cap_range = {1, 2};
        spec.weight_range = {0.5, 2.0};
        spec.seed = rng.next_u64();
        const sbm::Instance inst = sbm::gen_random(spec);
        const double sopt = sbm::sopt_dp(inst).value;
        const double opt = sbm::opt_fractional(inst).objective;
        out.require(sopt <= opt + 1e-9, "seed " + std::to_string(seed) + ": SOpt " +
                                            num(sopt) + " > Opt " + num(opt));
        if (inst.n_requests() <= 4) {
            const double brute = sbm::sopt_bruteforce(inst);
            max_gap = std::max(max_gap, std::abs(sopt - brute));
            ++checked_bruteforce;
        }
    }
    out.require(max_gap <= 1e-10, "dp vs bruteforce gap " + num(max_gap));
    out.note("bruteforce checks=" + std::to_string(checked_bruteforce) +
             " max_gap=" + num(max_gap));
    return out;
}

// criterion 7: dual identity on mixed instances
Outcome criterion_dual_identity() {
    Outcome out;
    double max_residual = 0.0;
    int runs = 0;
    const auto audit = [&](const sbm::Instance& inst, std::uint64_t seed) {
        sbm::OutcomeOracle oracle =
            sbm::OutcomeOracle::lazy_stream(sbm::SplitMix64::derive(seed, 0));
        const sbm::AuditedRun run = sbm::audited_run(inst, oracle);
        max_residual = std::max(max_residual, run.ledger.max_rel_residual);
        ++runs;
    };
    try {
        const sbm::Instance small = sbm::gen_gnb(2, 1, 0.5);
        const sbm::Instance medium = sbm::gen_gnb(3, 2, 0.1);
        sbm::FamilySpec hetero;
        hetero.kind = sbm::FamilySpec::Kind::hetero;
        const sbm::Instance wide = sbm::make_family_instance(hetero, 5);
        for (std::uint64_t seed = 0; seed < 25; ++seed) audit(small, seed);
        for (std::uint64_t seed = 0; seed < 25; ++seed) audit(medium, seed);
        for (std::uint64_t seed = 0; seed < 25; ++seed) audit(wide, seed);
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            sbm::RandomSpec spec;
            spec.n_servers = 3;
            spec.n_requests = 60;
            spec.edge_density = 0.6;
            spec.p_range = {0.05, 1.0};
            spec.cap_range = {1, 4};
            spec.weight_range = {0.5, 2.0};
            spec.seed = seed;
            audit(sbm::gen_random(spec), seed);
        }
    } catch (const std::exception& e) {
        out.require(false, std::string("ledger threw: ") + e.what());
    }
    out.require(max_residual < 1e-12, "max residual " + num(max_residual));
    out.note("runs=" + std::to_string(runs) + " max_residual=" + num(max_residual));
    return out;
}

void check_epsilon_curve(Outcome& out, const std::vector<sbm::EpsilonPoint>& curve,
                         const char* tag) {
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        out.require(curve[i + 1].min_ratio >=
                        curve[i].min_ratio - (curve[i].ci95 + curve[i + 1].ci95),
                    std::string(tag) + ": ratio fell at b=" + std::to_string(curve[i + 1].b));
    out.require(curve.back().min_ratio >= 0.95,
                std::string(tag) + ": final ratio " + num(curve.back().min_ratio) + " < 0.95");
    for (const auto& point : curve)
        out.require(point.max_rel_residual < 1e-12,
                    std::string(tag) + ": residual at b=" + std::to_string(point.b));
    std::string series;
    for (const auto& point : curve)
        series += (series.empty() ? "" : ",") + num(point.min_ratio);
    out.note(std::string(tag) + "=" + series);
}

// criterion 8: dual feasibility trend on the uniform family
Outcome criterion_epsilon_trend() {
    Outcome out;
    sbm::FamilySpec spec;
    spec.kind = sbm::FamilySpec::Kind::gnb;
    spec.n = 3;
    spec.p = 0.1;
    const std::vector<int> bs{1, 5, 25, 125};
    check_epsilon_curve(out, sbm::epsilon_curve(bs, spec, 10000, 8), "gnb");
    return out;
}

// criterion 9: identity + trend with heterogeneous capacities and weights
Outcome criterion_weighted_extension() {
    Outcome out;
    double max_residual = 0.0;
    try {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            sbm::RandomSpec spec;
            spec.n_servers = 3;
            spec.n_requests = 120;
            spec.edge_density = 0.7;
            spec.p_range = {0.05, 0.6};
            spec.cap_range = {5, 50};
            spec.weight_range = {0.5, 2.0};
            spec.seed = seed;
            const sbm::Instance inst = sbm::gen_random(spec);
            sbm::OutcomeOracle oracle =
                sbm::OutcomeOracle::lazy_stream(sbm::SplitMix64::derive(seed, 1));
            const sbm::AuditedRun run = sbm::audited_run(inst, oracle);
            max_residual = std::max(max_residual, run.ledger.max_rel_residual);
        }
    } catch (const std::exception& e) {
        out.require(false, std::string("ledger threw: ") + e.what());
    }
    out.require(max_residual < 1e-12, "max residual " + num(max_residual));
    out.note("max_residual=" + num(max_residual));

    sbm::FamilySpec spec;
    spec.kind = sbm::FamilySpec::Kind::hetero;
    spec.n = 3;
    spec.p = 0.1;
    const std::vector<int> bs{5, 25, 125};  // capacity profile b x {1,3,10}
    check_epsilon_curve(out, sbm::epsilon_curve(bs, spec, 10000, 9), "hetero");
    return out;
}

// criterion 10: exact poisson-binomial tail vs enumeration and chebyshev
Outcome criterion_poisson_binomial() {
    Outcome out;
    double max_gap = 0.0;
    sbm::SplitMix64 rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_range(0, 11));
        std::vector<double> probs(k);
        double load = 0.0;
        for (double& p : probs) {
            p = rng.next_real(0.02, 1.0);
            load += p;
        }
        const int b = static_cast<int>(rng.next_range(0, k + 1));

        double enumerated = 0.0;
        for (std::size_t mask = 0; mask < (1ULL << k); ++mask) {
            double prob = 1.0;
            int successes = 0;
            for (int i = 0; i < k; ++i) {
                if (mask & (1ULL << i)) {
                    prob *= probs[i];
                    ++successes;
                } else {
                    prob *= 1.0 - probs[i];
                }
            }
            if (successes >= b) enumerated += prob;
        }

        const double exact = sbm::poisson_binomial_tail(probs, b);
        max_gap = std::max(max_gap, std::abs(exact - enumerated));
        if (load < b)
            out.require(exact <= sbm::chebyshev_bound(load, b) + 1e-12,
                        "tail above chebyshev at trial " + std::to_string(trial));
    }
    out.require(max_gap <= 1e-12, "max enumeration gap " + num(max_gap));
    out.note("max_gap=" + num(max_gap));
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        double budget_seconds;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {1, "formula cross-validation (recurrence = closed form, 1e-9)", 1.0,
         criterion_formula_cross_validation},
        {2, "greedy simulation vs closed form (3 ci + 0.01 n)", 60.0,
         criterion_greedy_vs_closed},
        {3, "round distribution (TV < 0.02)", 60.0, criterion_round_distribution},
        {4, "balance bound (mean <= k b + 3 ci)", 120.0, criterion_sbal_bound},
        {5, "convergence to 1 - 1/e (window at n=200)", 600.0, criterion_convergence},
        {6, "benchmark ordering (SOpt <= Opt, dp = bruteforce)", 120.0,
         criterion_benchmark_ordering},
        {7, "dual identity (|P - c D| < 1e-12 relative)", 30.0, criterion_dual_identity},
        {8, "dual feasibility trend (>= 0.95 at b = 125)", 600.0, criterion_epsilon_trend},
        {9, "weighted/variable-capacity extension", 600.0, criterion_weighted_extension},
        {10, "poisson-binomial oracle (1e-12 vs 2^k)", 10.0, criterion_poisson_binomial},
    };

    bool all_pass = true;
    for (const Entry& entry : entries) {
        const auto start = Clock::now();
        Outcome out;
        try {
            out = entry.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (seconds > entry.budget_seconds) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("over budget ") +
                          num(entry.budget_seconds) + "s";
        }
        all_pass = all_pass && out.pass;
        std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL",
                    entry.id, entry.label, seconds, out.detail.empty() ? "" : " -- ",
                    out.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
