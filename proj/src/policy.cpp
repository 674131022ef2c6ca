#include "sbm/policy.hpp"

#include <cmath>

#include "sbm/errors.hpp"
#include "sbm/rng.hpp"

namespace sbm {

double potential(double load, int capacity) {
    if (load >= capacity) return 1.0;
    return std::exp(load / capacity - 1.0);
}

double potential_integral(double from, double to, int capacity) {
    // antiderivative: b e^{x/b - 1} below b, continuing with slope 1 above
    const double b = capacity;
    auto F = [b](double x) {
        if (x <= b) return b * std::exp(x / b - 1.0);
        return b + (x - b);
    };
    return F(to) - F(from);
}

namespace {

// Tie rank: a fixed hash of (request id, server id). Deterministic, but with
// no coherent ordering of server identities across requests. An id-ordered
// rule funnels every tie of every round to the same servers, which skews the
// per-server match counts on the G_n^b family and breaks its aggregate bound.
std::uint64_t tie_rank(int request, int server) {
    return SplitMix64::mix(static_cast<std::uint64_t>(request) * 0x9e3779b97f4a7c15ULL ^
                           static_cast<std::uint64_t>(server) * 0xbf58476d1ce4e5b9ULL);
}

}  // namespace

std::optional<int> StochasticBalancePolicy::select(const Request& request,
                                                   std::span<const ServerState> states) const {
    // Fast path: when every open neighbor has the same w * p, the score order
    // is exactly the order of min(load/capacity, 1), so the exp can be
    // skipped. This is the common case on the uniform families.
    int best = -1;
    double best_x = 2.0;
    double uniform_wp = -1.0;
    bool uniform = true;
    for (const Edge& e : request.edges) {
        const ServerState& st = states[e.server];
        if (st.full()) continue;
        const double wp = st.weight * e.probability;
        if (uniform_wp < 0.0)
            uniform_wp = wp;
        else if (wp != uniform_wp)
            uniform = false;
        const double x = std::min(st.load / st.capacity, 1.0);
        if (x < best_x ||
            (x == best_x && tie_rank(request.id, e.server) > tie_rank(request.id, best))) {
            best_x = x;
            best = e.server;
        }
    }
    if (best < 0) return std::nullopt;
    if (uniform) return best;

    double best_score = -1.0;
    best = -1;
    for (const Edge& e : request.edges) {
        const ServerState& st = states[e.server];
        if (st.full()) continue;
        const double score =
            st.weight * e.probability * (1.0 - potential(st.load, st.capacity));
        if (score > best_score ||
            (score == best_score && tie_rank(request.id, e.server) > tie_rank(request.id, best))) {
            best_score = score;
            best = e.server;
        }
    }
    return best;
}

std::optional<int> GreedyPolicy::select(const Request& request,
                                        std::span<const ServerState> states) const {
    for (const Edge& e : request.edges)
        if (!states[e.server].full()) return e.server;
    return std::nullopt;
}

std::unique_ptr<Policy> make_policy(std::string_view name) {
    if (name == "sbal") return std::make_unique<StochasticBalancePolicy>();
    if (name == "greedy") return std::make_unique<GreedyPolicy>();
    throw InvalidParameterError("unknown policy: " + std::string(name));
}

}  // namespace sbm
