#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbm/instance.hpp"

namespace sbm {

struct ConvergenceRow {
    int n = 0;
    double sbal_mean = 0.0;
    double sbal_ci95 = 0.0;
    double sbal_over_nb = 0.0;     // simulated E[SBal] / (n b)
    double bound_ratio = 0.0;      // analytic min(k, n)/n
    double greedy_ratio_nb = 0.0;  // analytic E[Gre(G_{nb}^1)] / (n b)
    double ratio_ub = 0.0;         // simulated SBal / (n b greedy_ratio(n b))
    double ratio_ub_ci95 = 0.0;
};

// Per-n convergence table on G_n^b: the ratio_ub column approaches 1 - 1/e
// from above. Duplicate n values are dropped with a warning on stderr.
std::vector<ConvergenceRow> convergence_table(const std::vector<int>& n_list, int b, double p,
                                              std::int64_t trials, std::uint64_t seed,
                                              int workers = 0);

struct CompareRow {
    std::string policy;
    double mean = 0.0;
    double ci95 = 0.0;
    std::optional<double> opt;        // absent when the LP refused the size
    std::optional<double> sopt;       // absent when the DP refused the size
    std::optional<double> ratio_opt;  // 0/0 reported as 1 with degenerate set
    std::optional<double> ratio_sopt;
    bool degenerate = false;
};

// Policy means against both offline benchmarks. Benchmark capacity errors
// leave the column empty and the run continues.
std::vector<CompareRow> compare_table(const Instance& inst,
                                      const std::vector<std::string>& policies,
                                      std::int64_t trials, std::uint64_t seed, int workers = 0);

}  // namespace sbm
