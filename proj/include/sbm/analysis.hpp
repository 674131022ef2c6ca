#pragma once

#include <span>
#include <vector>

namespace sbm {

// Finite pmf on support 0..max_value with exact normalization.
struct DistributionTable {
    std::vector<double> masses;  // masses[k] = Pr[K = k]

    int max_value() const { return static_cast<int>(masses.size()) - 1; }
    double mass_sum() const;
    double mean() const;
};

double total_variation(const DistributionTable& a, const DistributionTable& b);

// Law of the number of matches in one round against m units of remaining
// capacity, in the vanishing-probability limit: Pr[k] = b^k/(k! e^b) for
// k < m and the remaining mass at k = m. Computed by the multiplicative
// recurrence from e^{-b}, no factorial tables.
DistributionTable round_dist(int b, int m);

// Upper bound on the expected matches of server j (1-based) under the
// balance policy on G_n^b: b * min(sum_{i=1..j} 1/(n-i+1), 1).
double sbal_server_bound(int n, int b, int j);

struct BoundReport {
    int n = 0;
    int b = 0;
    int k = 0;                          // ceil((1 - 1/e) (n+1))
    std::vector<double> server_bounds;  // index j-1 holds the bound for s_j
    double aggregate = 0.0;             // min(k, n) * b
    double ratio = 0.0;                 // min(k, n) / n, in (0, 1]
};

// Aggregate upper bound on expected balance matches on G_n^b and the implied
// ratio bound, which tends to 1 - 1/e as n grows.
BoundReport sbal_total_bound(int n, int b);

// Expected greedy matches E[T_{n,m}] on G_n^1 with only the last m servers
// present, by the two-case memoized recurrence (base E[T_{0,0}] = 0).
double greedy_expect_recurrence(int n, int m);

// Closed form E[T_{n,m}] = m - sum_{k=0}^{m-1} (n-k)^{m-k-1}/((m-k-1)! e^{n-k}),
// evaluated in log space.
double greedy_expect_closed(int n, int m);

// E[Gre(G_n^1)] / n = 1 - (1/n) sum_{k=1..n} k^{k-1}/((k-1)! e^k), -> 1.
double greedy_ratio(int n);

// The k-th summand above; decays like 1/sqrt(2 pi k).
double greedy_ratio_summand(int k);

// Exact Pr[X >= b] for X Poisson-binomial over probs, by the O(k b)
// convolution with an absorbing top cell.
double poisson_binomial_tail(std::span<const double> probs, int b);

// Chebyshev bound load/(b-load)^2 on Pr[X >= b], clipped to [0, 1].
// Requires 0 <= load < b.
double chebyshev_bound(double load, int capacity);

}  // namespace sbm
