#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sbm {

struct Server {
    int id = 0;
    int capacity = 1;      // number of successful matches the server can hold
    double weight = 1.0;   // value of each successful match incident to it
};

struct Edge {
    int server = 0;
    double probability = 1.0;  // in (0, 1]
};

// Edges are kept sorted by server id; tie-breaking elsewhere relies on it.
struct Request {
    int id = 0;
    std::vector<Edge> edges;
};

struct Metadata {
    std::string generator;                         // "gnb", "random", "split(...)", ...
    std::map<std::string, std::string> params;     // numeric values stored round-trippable
};

// Immutable bipartite instance: servers, requests in arrival order, metadata.
// Safe to share across concurrent workers once constructed.
class Instance {
public:
    Instance(std::vector<Server> servers, std::vector<Request> requests, Metadata metadata);

    const std::vector<Server>& servers() const { return servers_; }
    const std::vector<Request>& requests() const { return requests_; }
    const Metadata& metadata() const { return metadata_; }

    int n_servers() const { return static_cast<int>(servers_.size()); }
    int n_requests() const { return static_cast<int>(requests_.size()); }
    std::size_t n_edges() const { return n_edges_; }
    std::int64_t total_capacity() const;

    // Numeric metadata parameter, or throws InvalidParameterError if absent.
    double param(const std::string& key) const;
    bool has_param(const std::string& key) const;

private:
    std::vector<Server> servers_;
    std::vector<Request> requests_;
    Metadata metadata_;
    std::size_t n_edges_ = 0;
};

// Adversarial family G_n^b: n servers of capacity b, n rounds of round(b/p)
// identical requests; round i is adjacent to servers i..n with probability p.
// Warns on stderr when b/p is not an integer (count is rounded to nearest).
Instance gen_gnb(int n, int b, double p);

// Replaces every server of capacity b_s by b_s unit-capacity copies with the
// same weight and neighborhoods. Copies are ordered (server id, copy index).
Instance vertex_split(const Instance& inst);

struct RandomSpec {
    int n_servers = 1;
    int n_requests = 1;
    double edge_density = 1.0;                 // in (0, 1]
    std::pair<double, double> p_range{1.0, 1.0};
    std::pair<int, int> cap_range{1, 1};
    std::pair<double, double> weight_range{1.0, 1.0};
    std::uint64_t seed = 0;
};

// Deterministic given the seed; requests are resampled until non-isolated.
Instance gen_random(const RandomSpec& spec);

// Instance file i/o, schema version 1. load(save(x)) is the identity with
// bit-exact probabilities.
void save(const Instance& inst, const std::string& path);
Instance load(const std::string& path);
std::string to_json(const Instance& inst);
Instance from_json(const std::string& text);

bool structurally_equal(const Instance& a, const Instance& b);

// Round-trippable decimal formatting used for params and reports.
std::string format_double(double v);

}  // namespace sbm
