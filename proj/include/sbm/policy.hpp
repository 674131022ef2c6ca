#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "sbm/instance.hpp"

namespace sbm {

// c = 1 - 1/e, the competitive-ratio constant of the balance analysis.
inline const double kBalanceRate = 1.0 - std::exp(-1.0);

struct ServerState {
    double load = 0.0;   // sum of edge probabilities of requests assigned here
    int successes = 0;
    int capacity = 1;
    double weight = 1.0;

    bool full() const { return successes >= capacity; }
};

// Trade-off potential f_s(x) = exp(x/b_s - 1) for x <= b_s, 1 beyond.
// Non-decreasing, range [1/e, 1] on [0, b_s].
double potential(double load, int capacity);

// Integral of the potential over [from, to] for a capacity-b server.
double potential_integral(double from, double to, int capacity);

// A policy is a pure function of (request, server states): no internal state,
// safe to share across concurrent trials.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string_view name() const = 0;
    // Server to assign the request to, or nullopt to leave it unassigned.
    // Returned servers must be adjacent and non-full.
    virtual std::optional<int> select(const Request& request,
                                      std::span<const ServerState> states) const = 0;
};

// Generalized balance rule: argmax of w_s * p_{s,r} * (1 - f_s(load)) over
// neighbors with remaining capacity. Ties go to a fixed per-(request, server)
// hash: deterministic, but symmetric across server identities, which the
// per-server match accounting of the adversarial family relies on. With
// uniform weights, probabilities and capacities this picks a minimum-load
// neighbor. A server stays eligible while successes < capacity even if its
// load exceeds capacity (the score is then 0).
class StochasticBalancePolicy final : public Policy {
public:
    std::string_view name() const override { return "sbal"; }
    std::optional<int> select(const Request& request,
                              std::span<const ServerState> states) const override;
};

// Lowest-id adjacent server with remaining capacity.
class GreedyPolicy final : public Policy {
public:
    std::string_view name() const override { return "greedy"; }
    std::optional<int> select(const Request& request,
                              std::span<const ServerState> states) const override;
};

// "sbal" | "greedy", or InvalidParameterError.
std::unique_ptr<Policy> make_policy(std::string_view name);

}  // namespace sbm
