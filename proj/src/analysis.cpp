#include "sbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sbm/errors.hpp"

namespace sbm {

double DistributionTable::mass_sum() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

double DistributionTable::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) s += static_cast<double>(k) * masses[k];
    return s;
}

double total_variation(const DistributionTable& a, const DistributionTable& b) {
    const std::size_t n = std::max(a.masses.size(), b.masses.size());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double pa = k < a.masses.size() ? a.masses[k] : 0.0;
        const double pb = k < b.masses.size() ? b.masses[k] : 0.0;
        d += std::abs(pa - pb);
    }
    return d / 2.0;
}

DistributionTable round_dist(int b, int m) {
    if (b < 1) throw InvalidParameterError("round_dist: b must be >= 1");
    if (m < 0) throw InvalidParameterError("round_dist: m must be >= 0");
    DistributionTable table;
    table.masses.resize(m + 1);
    double mass = std::exp(-static_cast<double>(b));  // Pr[Pois(b) = 0]
    double below = 0.0;
    for (int k = 0; k < m; ++k) {
        table.masses[k] = mass;
        below += mass;
        mass *= static_cast<double>(b) / (k + 1);
    }
    table.masses[m] = std::max(0.0, 1.0 - below);
    return table;
}

double sbal_server_bound(int n, int b, int j) {
    if (n < 1 || b < 1) throw InvalidParameterError("sbal_server_bound: n, b must be >= 1");
    if (j < 1 || j > n) throw InvalidParameterError("sbal_server_bound: need 1 <= j <= n");
    double sum = 0.0;
    for (int i = 1; i <= j; ++i) sum += 1.0 / (n - i + 1);
    return b * std::min(sum, 1.0);
}

BoundReport sbal_total_bound(int n, int b) {
    if (n < 1 || b < 1) throw InvalidParameterError("sbal_total_bound: n, b must be >= 1");
    BoundReport report;
    report.n = n;
    report.b = b;
    report.k = static_cast<int>(std::ceil((1.0 - std::exp(-1.0)) * (n + 1)));
    report.server_bounds.resize(n);
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) {
        sum += 1.0 / (n - i + 1);
        report.server_bounds[i - 1] = b * std::min(sum, 1.0);
    }
    const int k_eff = std::min(report.k, n);
    report.aggregate = static_cast<double>(k_eff) * b;
    report.ratio = static_cast<double>(k_eff) / n;
    return report;
}

namespace {

constexpr int kRecurrenceCap = 5000;

// Dense memo over (n', m'), row-by-row. pois1[k] = 1/(k! e) via the
// multiplicative recurrence.
std::vector<double> greedy_table(int n) {
    std::vector<double> pois1(n + 1);
    pois1[0] = std::exp(-1.0);
    for (int k = 0; k + 1 <= n; ++k) pois1[k + 1] = pois1[k] / (k + 1);

    // row r holds E[T_{r, m}] for m = 0..r
    std::vector<double> prev{0.0};  // T_{0,0}
    for (int r = 1; r <= n; ++r) {
        std::vector<double> cur(r + 1);
        cur[0] = 0.0;
        for (int m = 1; m < r; ++m) {
            double value = 0.0;
            double below = 0.0;
            for (int k = 0; k <= m - 1; ++k) {
                value += pois1[k] * (k + prev[m - k]);
                below += pois1[k];
            }
            cur[m] = value + (1.0 - below) * m;
        }
        {
            // m = r: zero matches leave the full next graph, not m-k servers
            double value = pois1[0] * prev[r - 1];
            double below = pois1[0];
            for (int k = 1; k <= r - 1; ++k) {
                value += pois1[k] * (k + prev[r - k]);
                below += pois1[k];
            }
            cur[r] = value + (1.0 - below) * r;
        }
        prev = std::move(cur);
    }
    return prev;
}

}  // namespace

double greedy_expect_recurrence(int n, int m) {
    if (n < 0 || m < 0) throw InvalidParameterError("greedy_expect_recurrence: negative argument");
    if (m > n) throw InvalidParameterError("greedy_expect_recurrence: m must be <= n");
    if (n > kRecurrenceCap)
        throw CapacityError("greedy_expect_recurrence: n above memoization cap");
    return greedy_table(n)[m];
}

double greedy_expect_closed(int n, int m) {
    if (n < 0 || m < 0) throw InvalidParameterError("greedy_expect_closed: negative argument");
    if (m > n) throw InvalidParameterError("greedy_expect_closed: m must be <= n");
    double sum = 0.0;
    for (int k = 0; k <= m - 1; ++k) {
        // (n-k)^{m-k-1} / ((m-k-1)! e^{n-k}), in log space
        const double log_term = (m - k - 1) * std::log(static_cast<double>(n - k)) -
                                std::lgamma(static_cast<double>(m - k)) -
                                static_cast<double>(n - k);
        sum += std::exp(log_term);
    }
    return m - sum;
}

double greedy_ratio_summand(int k) {
    if (k < 1) throw InvalidParameterError("greedy_ratio_summand: k must be >= 1");
    return std::exp((k - 1) * std::log(static_cast<double>(k)) -
                    std::lgamma(static_cast<double>(k)) - static_cast<double>(k));
}

double greedy_ratio(int n) {
    if (n < 1) throw InvalidParameterError("greedy_ratio: n must be >= 1");
    double sum = 0.0;
    for (int k = 1; k <= n; ++k) sum += greedy_ratio_summand(k);
    return 1.0 - sum / n;
}

double poisson_binomial_tail(std::span<const double> probs, int b) {
    if (b < 0) throw InvalidParameterError("poisson_binomial_tail: b must be >= 0");
    for (double p : probs)
        if (!(p > 0.0) || p > 1.0)
            throw InvalidParameterError("poisson_binomial_tail: probabilities must lie in (0, 1]");
    if (b == 0) return 1.0;
    // q[j] = Pr[min(X, b) = j]; the top cell absorbs
    std::vector<double> q(b + 1, 0.0);
    q[0] = 1.0;
    for (double p : probs) {
        for (int j = b; j >= 1; --j) {
            if (j == b)
                q[j] += q[j - 1] * p;
            else
                q[j] = q[j] * (1.0 - p) + q[j - 1] * p;
        }
        q[0] *= 1.0 - p;
    }
    return q[b];
}

double chebyshev_bound(double load, int capacity) {
    if (!(load >= 0.0)) throw InvalidParameterError("chebyshev_bound: load must be >= 0");
    if (load >= capacity) throw InvalidParameterError("chebyshev_bound: load must be < capacity");
    const double gap = capacity - load;
    return std::min(load / (gap * gap), 1.0);
}

}  // namespace sbm
