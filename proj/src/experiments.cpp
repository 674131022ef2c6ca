#include "sbm/experiments.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "sbm/analysis.hpp"
#include "sbm/benchmarks.hpp"
#include "sbm/engine.hpp"
#include "sbm/errors.hpp"
#include "sbm/policy.hpp"

namespace sbm {

std::vector<ConvergenceRow> convergence_table(const std::vector<int>& n_list, int b, double p,
                                              std::int64_t trials, std::uint64_t seed,
                                              int workers) {
    if (n_list.empty()) throw InvalidParameterError("convergence: n list must be non-empty");

    std::vector<int> ns;
    std::set<int> seen;
    for (int n : n_list) {
        if (!seen.insert(n).second) {
            std::cerr << "convergence: dropping duplicate n=" << n << "\n";
            continue;
        }
        ns.push_back(n);
    }

    StochasticBalancePolicy sbal;
    std::vector<ConvergenceRow> rows;
    rows.reserve(ns.size());
    for (int n : ns) {
        const Instance inst = gen_gnb(n, b, p);
        const Stats stats = monte_carlo(inst, sbal, trials,
                                        SplitMix64::derive_key(seed, static_cast<std::uint64_t>(n)),
                                        workers);
        ConvergenceRow row;
        row.n = n;
        row.sbal_mean = stats.mean;
        row.sbal_ci95 = stats.ci95;
        const double nb = static_cast<double>(n) * b;
        row.sbal_over_nb = stats.mean / nb;
        row.bound_ratio = sbal_total_bound(n, b).ratio;
        row.greedy_ratio_nb = greedy_ratio(n * b);
        row.ratio_ub = stats.mean / (nb * row.greedy_ratio_nb);
        row.ratio_ub_ci95 = stats.ci95 / (nb * row.greedy_ratio_nb);
        rows.push_back(row);
    }
    return rows;
}

std::vector<CompareRow> compare_table(const Instance& inst,
                                      const std::vector<std::string>& policies,
                                      std::int64_t trials, std::uint64_t seed, int workers) {
    if (policies.empty()) throw InvalidParameterError("compare: need at least one policy");

    std::optional<double> opt, sopt;
    try {
        opt = opt_fractional(inst).objective;
    } catch (const CapacityError& e) {
        std::cerr << "compare: Opt column skipped: " << e.what() << "\n";
    }
    try {
        sopt = sopt_dp(inst).value;
    } catch (const CapacityError& e) {
        std::cerr << "compare: SOpt column skipped: " << e.what() << "\n";
    }

    // 0/0 is reported as ratio 1 with the degenerate flag: an empty instance
    // is vacuously optimal.
    const auto ratio_against = [](double mean, double benchmark,
                                  bool& degenerate) -> double {
        if (benchmark == 0.0) {
            degenerate = true;
            return 1.0;
        }
        return mean / benchmark;
    };

    std::vector<CompareRow> rows;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        const auto policy = make_policy(policies[i]);
        const Stats stats =
            monte_carlo(inst, *policy, trials, SplitMix64::derive_key(seed, i), workers);
        CompareRow row;
        row.policy = policies[i];
        row.mean = stats.mean;
        row.ci95 = stats.ci95;
        row.opt = opt;
        row.sopt = sopt;
        if (opt) row.ratio_opt = ratio_against(stats.mean, *opt, row.degenerate);
        if (sopt) row.ratio_sopt = ratio_against(stats.mean, *sopt, row.degenerate);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sbm
