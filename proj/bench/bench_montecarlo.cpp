// Compares the serial reference Monte Carlo kernel against the OpenMP one
// and checks that they agree bit-exactly.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "sbm/engine.hpp"
#include "sbm/instance.hpp"
#include "sbm/policy.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int main(int argc, char** argv) {
    const std::int64_t trials = argc > 1 ? std::atoll(argv[1]) : 4000;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;

    const sbm::Instance inst = sbm::gen_gnb(50, 2, 0.02);
    std::printf("instance: G_50^2, p=0.02 (%d requests, %zu edges), %lld trials\n",
                inst.n_requests(), inst.n_edges(), static_cast<long long>(trials));

    sbm::StochasticBalancePolicy sbal;

    auto t0 = Clock::now();
    const sbm::Stats serial = sbm::monte_carlo_serial(inst, sbal, trials, seed);
    const double serial_s = seconds_since(t0);

    t0 = Clock::now();
    const sbm::Stats parallel = sbm::monte_carlo(inst, sbal, trials, seed, 0);
    const double parallel_s = seconds_since(t0);

    std::printf("%-10s %12s %12s %12s\n", "kernel", "mean", "ci95", "seconds");
    std::printf("%-10s %12.6f %12.6f %12.3f\n", "serial", serial.mean, serial.ci95, serial_s);
    std::printf("%-10s %12.6f %12.6f %12.3f\n", "openmp", parallel.mean, parallel.ci95,
                parallel_s);
    std::printf("speedup: %.2fx (%d workers)\n", serial_s / parallel_s,
                sbm::resolve_workers(0));

    const bool identical = serial.mean == parallel.mean &&
                           serial.variance == parallel.variance &&
                           serial.server_mean_successes == parallel.server_mean_successes;
    std::printf("bit-identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
