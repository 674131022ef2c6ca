#include "sbm/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sbm/errors.hpp"
#include "sbm/rng.hpp"

#include "json.hpp"

namespace sbm {

namespace {

void validate(const std::vector<Server>& servers, const std::vector<Request>& requests) {
    const int n = static_cast<int>(servers.size());
    for (int s = 0; s < n; ++s) {
        if (servers[s].id != s)
            throw InvalidParameterError("server ids must be dense 0..n-1");
        if (servers[s].capacity < 1)
            throw InvalidParameterError("server capacity must be >= 1");
        if (!(servers[s].weight > 0.0))
            throw InvalidParameterError("server weight must be > 0");
    }
    for (std::size_t r = 0; r < requests.size(); ++r) {
        if (requests[r].id != static_cast<int>(r))
            throw InvalidParameterError("request ids must be dense arrival indices");
        int prev = -1;
        for (const Edge& e : requests[r].edges) {
            if (e.server < 0 || e.server >= n)
                throw InvalidParameterError("edge refers to an unknown server");
            if (e.server <= prev)
                throw InvalidParameterError("request edges must be sorted by server id, no duplicates");
            if (!(e.probability > 0.0) || e.probability > 1.0)
                throw InvalidParameterError("edge probability must lie in (0, 1]");
            prev = e.server;
        }
    }
}

}  // namespace

Instance::Instance(std::vector<Server> servers, std::vector<Request> requests, Metadata metadata)
    : servers_(std::move(servers)), requests_(std::move(requests)), metadata_(std::move(metadata)) {
    validate(servers_, requests_);
    for (const Request& r : requests_) n_edges_ += r.edges.size();
}

std::int64_t Instance::total_capacity() const {
    std::int64_t total = 0;
    for (const Server& s : servers_) total += s.capacity;
    return total;
}

bool Instance::has_param(const std::string& key) const {
    return metadata_.params.count(key) > 0;
}

double Instance::param(const std::string& key) const {
    auto it = metadata_.params.find(key);
    if (it == metadata_.params.end())
        throw InvalidParameterError("missing metadata parameter: " + key);
    return std::strtod(it->second.c_str(), nullptr);
}

std::string format_double(double v) {
    char buf[40];
    // shortest decimal form that parses back to the same double
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

Instance gen_gnb(int n, int b, double p) {
    if (n < 1) throw InvalidParameterError("gen_gnb: n must be >= 1");
    if (b < 1) throw InvalidParameterError("gen_gnb: b must be >= 1");
    if (!(p > 0.0) || p > 1.0) throw InvalidParameterError("gen_gnb: p must lie in (0, 1]");

    const double exact = static_cast<double>(b) / p;
    const long long round_size = std::llround(exact);
    if (std::abs(exact - static_cast<double>(round_size)) > 1e-9 * exact) {
        std::cerr << "gen_gnb: b/p = " << exact << " is not an integer; using round size "
                  << round_size << "\n";
    }

    std::vector<Server> servers(n);
    for (int s = 0; s < n; ++s) servers[s] = {s, b, 1.0};

    std::vector<Request> requests;
    requests.reserve(static_cast<std::size_t>(n) * round_size);
    int id = 0;
    for (int round = 1; round <= n; ++round) {
        std::vector<Edge> edges;
        edges.reserve(n - round + 1);
        for (int s = round - 1; s < n; ++s) edges.push_back({s, p});
        for (long long i = 0; i < round_size; ++i) requests.push_back({id++, edges});
    }

    Metadata meta;
    meta.generator = "gnb";
    meta.params["n"] = std::to_string(n);
    meta.params["b"] = std::to_string(b);
    meta.params["p"] = format_double(p);
    meta.params["round_size"] = std::to_string(round_size);
    return Instance(std::move(servers), std::move(requests), std::move(meta));
}

Instance vertex_split(const Instance& inst) {
    std::vector<int> first_copy(inst.n_servers());
    std::vector<Server> servers;
    int next = 0;
    for (const Server& s : inst.servers()) {
        first_copy[s.id] = next;
        for (int c = 0; c < s.capacity; ++c) servers.push_back({next++, 1, s.weight});
    }

    std::vector<Request> requests;
    requests.reserve(inst.n_requests());
    for (const Request& r : inst.requests()) {
        Request nr{r.id, {}};
        for (const Edge& e : r.edges) {
            const int copies = inst.servers()[e.server].capacity;
            for (int c = 0; c < copies; ++c)
                nr.edges.push_back({first_copy[e.server] + c, e.probability});
        }
        // copies of consecutive servers stay sorted by construction
        requests.push_back(std::move(nr));
    }

    Metadata meta = inst.metadata();
    meta.generator = "split(" + inst.metadata().generator + ")";
    return Instance(std::move(servers), std::move(requests), std::move(meta));
}

Instance gen_random(const RandomSpec& spec) {
    if (spec.n_servers < 1) throw InvalidParameterError("gen_random: need at least one server");
    if (spec.n_requests < 0) throw InvalidParameterError("gen_random: negative request count");
    if (!(spec.edge_density > 0.0) || spec.edge_density > 1.0)
        throw InvalidParameterError("gen_random: edge density must lie in (0, 1]");
    if (!(spec.p_range.first > 0.0) || spec.p_range.second > 1.0 ||
        spec.p_range.first > spec.p_range.second)
        throw InvalidParameterError("gen_random: p range must be non-empty within (0, 1]");
    if (spec.cap_range.first < 1 || spec.cap_range.first > spec.cap_range.second)
        throw InvalidParameterError("gen_random: capacity range must be non-empty, >= 1");
    if (!(spec.weight_range.first > 0.0) || spec.weight_range.first > spec.weight_range.second)
        throw InvalidParameterError("gen_random: weight range must be non-empty, > 0");

    SplitMix64 rng(spec.seed);
    std::vector<Server> servers(spec.n_servers);
    for (int s = 0; s < spec.n_servers; ++s) {
        const int cap = static_cast<int>(
            rng.next_range(spec.cap_range.first, spec.cap_range.second));
        servers[s] = {s, cap, rng.next_real(spec.weight_range.first, spec.weight_range.second)};
    }

    std::vector<Request> requests(spec.n_requests);
    for (int r = 0; r < spec.n_requests; ++r) {
        requests[r].id = r;
        do {
            requests[r].edges.clear();
            for (int s = 0; s < spec.n_servers; ++s) {
                if (rng.next_double() < spec.edge_density)
                    requests[r].edges.push_back(
                        {s, rng.next_real(spec.p_range.first, spec.p_range.second)});
            }
        } while (requests[r].edges.empty());  // resample until non-isolated
    }

    Metadata meta;
    meta.generator = "random";
    meta.params["n_servers"] = std::to_string(spec.n_servers);
    meta.params["n_requests"] = std::to_string(spec.n_requests);
    meta.params["edge_density"] = format_double(spec.edge_density);
    meta.params["p_lo"] = format_double(spec.p_range.first);
    meta.params["p_hi"] = format_double(spec.p_range.second);
    meta.params["cap_lo"] = std::to_string(spec.cap_range.first);
    meta.params["cap_hi"] = std::to_string(spec.cap_range.second);
    meta.params["w_lo"] = format_double(spec.weight_range.first);
    meta.params["w_hi"] = format_double(spec.weight_range.second);
    meta.params["seed"] = std::to_string(spec.seed);
    return Instance(std::move(servers), std::move(requests), std::move(meta));
}

std::string to_json(const Instance& inst) {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["servers"] = nlohmann::ordered_json::array();
    for (const Server& s : inst.servers())
        doc["servers"].push_back({{"capacity", s.capacity}, {"weight", s.weight}});
    doc["requests"] = nlohmann::ordered_json::array();
    for (const Request& r : inst.requests()) {
        nlohmann::ordered_json edges = nlohmann::ordered_json::array();
        for (const Edge& e : r.edges)
            edges.push_back({{"server", e.server}, {"p", e.probability}});
        doc["requests"].push_back(std::move(edges));
    }
    doc["metadata"] = {{"generator", inst.metadata().generator},
                       {"params", inst.metadata().params}};
    return doc.dump(2) + "\n";
}

Instance from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("instance parse error: ") + e.what());
    }
    try {
        if (!doc.contains("schema") || !doc["schema"].is_number_integer())
            throw FormatError("instance file: missing schema field");
        if (doc["schema"].get<int>() != 1)
            throw FormatError("instance file: unsupported schema version " +
                              doc["schema"].dump());

        std::vector<Server> servers;
        int id = 0;
        for (const auto& s : doc.at("servers"))
            servers.push_back({id++, s.at("capacity").get<int>(), s.at("weight").get<double>()});

        std::vector<Request> requests;
        int rid = 0;
        for (const auto& r : doc.at("requests")) {
            Request req{rid++, {}};
            for (const auto& e : r)
                req.edges.push_back({e.at("server").get<int>(), e.at("p").get<double>()});
            requests.push_back(std::move(req));
        }

        Metadata meta;
        if (doc.contains("metadata")) {
            meta.generator = doc["metadata"].value("generator", "");
            if (doc["metadata"].contains("params"))
                for (const auto& [k, v] : doc["metadata"]["params"].items())
                    meta.params[k] = v.get<std::string>();
        }
        return Instance(std::move(servers), std::move(requests), std::move(meta));
    } catch (const FormatError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("instance file: ") + e.what());
    } catch (const InvalidParameterError& e) {
        throw FormatError(std::string("instance file violates invariants: ") + e.what());
    }
}

void save(const Instance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << to_json(inst);
    if (!out) throw FormatError("write failed: " + path);
}

Instance load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

bool structurally_equal(const Instance& a, const Instance& b) {
    if (a.n_servers() != b.n_servers() || a.n_requests() != b.n_requests()) return false;
    for (int s = 0; s < a.n_servers(); ++s) {
        if (a.servers()[s].capacity != b.servers()[s].capacity) return false;
        if (a.servers()[s].weight != b.servers()[s].weight) return false;
    }
    for (int r = 0; r < a.n_requests(); ++r) {
        const auto& ea = a.requests()[r].edges;
        const auto& eb = b.requests()[r].edges;
        if (ea.size() != eb.size()) return false;
        for (std::size_t i = 0; i < ea.size(); ++i)
            if (ea[i].server != eb[i].server || ea[i].probability != eb[i].probability)
                return false;
    }
    return a.metadata().generator == b.metadata().generator &&
           a.metadata().params == b.metadata().params;
}

}  // namespace sbm
