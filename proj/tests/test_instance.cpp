#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "sbm/errors.hpp"
#include "sbm/instance.hpp"

using namespace sbm;

namespace {

std::set<int> neighbor_ids(const Request& r) {
    std::set<int> ids;
    for (const Edge& e : r.edges) ids.insert(e.server);
    return ids;
}

std::string temp_path(const char* name) {
    return std::string("/tmp/sbm_test_") + name + ".json";
}

}  // namespace

TEST_CASE("gen_gnb builds the adversarial family") {
    const Instance inst = gen_gnb(2, 1, 0.5);
    REQUIRE(inst.n_servers() == 2);
    REQUIRE(inst.n_requests() == 4);
    // round 1 requests see both servers, round 2 only the last
    CHECK(neighbor_ids(inst.requests()[0]) == std::set<int>{0, 1});
    CHECK(neighbor_ids(inst.requests()[1]) == std::set<int>{0, 1});
    CHECK(neighbor_ids(inst.requests()[2]) == std::set<int>{1});
    CHECK(neighbor_ids(inst.requests()[3]) == std::set<int>{1});
    for (const Server& s : inst.servers()) {
        CHECK(s.capacity == 1);
        CHECK(s.weight == 1.0);
    }
}

TEST_CASE("gen_gnb degenerate round") {
    const Instance inst = gen_gnb(1, 1, 1.0);
    CHECK(inst.n_servers() == 1);
    CHECK(inst.n_requests() == 1);
    REQUIRE(inst.requests()[0].edges.size() == 1);
    CHECK(inst.requests()[0].edges[0].probability == 1.0);
}

TEST_CASE("gen_gnb sizes scale as n * b/p") {
    const Instance inst = gen_gnb(3, 2, 0.1);
    CHECK(inst.n_servers() == 3);
    CHECK(inst.n_requests() == 60);
    CHECK(inst.param("round_size") == 20);
    // server s_j has degree j * round_size
    std::vector<int> degree(3, 0);
    for (const Request& r : inst.requests())
        for (const Edge& e : r.edges) degree[e.server] += 1;
    CHECK(degree[0] == 20);
    CHECK(degree[1] == 40);
    CHECK(degree[2] == 60);
}

TEST_CASE("gen_gnb rejects bad parameters") {
    CHECK_THROWS_AS(gen_gnb(0, 1, 0.5), InvalidParameterError);
    CHECK_THROWS_AS(gen_gnb(2, 0, 0.5), InvalidParameterError);
    CHECK_THROWS_AS(gen_gnb(2, 1, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(gen_gnb(2, 1, 1.5), InvalidParameterError);
}

TEST_CASE("gen_gnb rounds fractional b/p to the nearest count") {
    const Instance inst = gen_gnb(2, 1, 0.7);  // b/p = 1.43 -> 1
    CHECK(inst.n_requests() == 2);
}

TEST_CASE("vertex_split replaces servers by unit copies") {
    const Instance inst = gen_gnb(2, 2, 0.5);
    const Instance split = vertex_split(inst);
    REQUIRE(split.n_servers() == 4);
    for (const Server& s : split.servers()) CHECK(s.capacity == 1);
    CHECK(split.n_requests() == inst.n_requests());
    CHECK(split.total_capacity() == inst.total_capacity());

    // every copy of s_i inherits s_i's neighbors: edge count scales by capacity
    std::size_t expected_edges = 0;
    for (const Request& r : inst.requests())
        for (const Edge& e : r.edges)
            expected_edges += inst.servers()[e.server].capacity;
    CHECK(split.n_edges() == expected_edges);
}

TEST_CASE("vertex_split fixes unit-capacity instances") {
    const Instance inst = gen_gnb(3, 1, 0.5);
    const Instance split = vertex_split(inst);
    CHECK(split.n_servers() == inst.n_servers());
    CHECK(split.n_edges() == inst.n_edges());
    for (int r = 0; r < inst.n_requests(); ++r)
        CHECK(neighbor_ids(split.requests()[r]) == neighbor_ids(inst.requests()[r]));
}

TEST_CASE("split of G_2^2 contains G_4^1 as a subgraph") {
    const Instance split = vertex_split(gen_gnb(2, 2, 0.5));
    const Instance flat = gen_gnb(4, 1, 0.5);
    REQUIRE(split.n_requests() == flat.n_requests());
    REQUIRE(split.n_servers() == flat.n_servers());
    for (int r = 0; r < flat.n_requests(); ++r) {
        const auto have = neighbor_ids(split.requests()[r]);
        for (int id : neighbor_ids(flat.requests()[r])) CHECK(have.count(id) == 1);
    }
}

TEST_CASE("gen_random is deterministic and respects point ranges") {
    const RandomSpec spec{2, 3, 1.0, {0.5, 0.5}, {1, 1}, {1.0, 1.0}, 7};
    const Instance a = gen_random(spec);
    const Instance b = gen_random(spec);
    CHECK(structurally_equal(a, b));
    CHECK(a.n_edges() == 6);  // complete 2x3 graph
    for (const Request& r : a.requests())
        for (const Edge& e : r.edges) CHECK(e.probability == 0.5);
}

TEST_CASE("gen_random output satisfies instance invariants") {
    const RandomSpec spec{3, 5, 0.4, {0.1, 0.9}, {1, 3}, {1.0, 2.0}, 1};
    const Instance inst = gen_random(spec);  // constructor validates
    CHECK(inst.n_servers() == 3);
    CHECK(inst.n_requests() == 5);
    for (const Request& r : inst.requests()) CHECK(r.edges.size() >= 1);
    for (const Server& s : inst.servers()) {
        CHECK(s.capacity >= 1);
        CHECK(s.capacity <= 3);
        CHECK(s.weight >= 1.0);
        CHECK(s.weight <= 2.0);
    }
}

TEST_CASE("gen_random rejects impossible constraints") {
    RandomSpec spec;
    spec.edge_density = 0.0;
    CHECK_THROWS_AS(gen_random(spec), InvalidParameterError);
    spec.edge_density = 0.5;
    spec.p_range = {0.9, 0.1};
    CHECK_THROWS_AS(gen_random(spec), InvalidParameterError);
}

TEST_CASE("save/load round-trip is the identity") {
    const Instance inst = gen_gnb(3, 2, 0.1);
    const std::string path = temp_path("roundtrip");
    save(inst, path);
    const Instance back = load(path);
    CHECK(structurally_equal(inst, back));
    CHECK(back.metadata().generator == "gnb");
    CHECK(back.metadata().params.at("p") == inst.metadata().params.at("p"));
    std::remove(path.c_str());
}

TEST_CASE("round-trip keeps probabilities bit-exact") {
    RandomSpec spec{2, 4, 0.9, {0.1234567890123456, 0.987654321}, {1, 2}, {0.5, 1.5}, 99};
    const Instance inst = gen_random(spec);
    const Instance back = from_json(to_json(inst));
    REQUIRE(structurally_equal(inst, back));
    for (int r = 0; r < inst.n_requests(); ++r)
        for (std::size_t i = 0; i < inst.requests()[r].edges.size(); ++i)
            CHECK(inst.requests()[r].edges[i].probability ==
                  back.requests()[r].edges[i].probability);
}

TEST_CASE("load rejects truncated and wrong-schema files") {
    const Instance inst = gen_gnb(2, 1, 0.5);
    const std::string text = to_json(inst);

    CHECK_THROWS_AS(from_json(text.substr(0, text.size() / 2)), FormatError);

    std::string wrong = text;
    wrong.replace(wrong.find("\"schema\": 1"), 11, "\"schema\": 2");
    CHECK_THROWS_AS(from_json(wrong), FormatError);

    CHECK_THROWS_AS(load("/tmp/sbm_no_such_file.json"), FormatError);
}

TEST_CASE("instance invariants are enforced") {
    CHECK_THROWS_AS(Instance({{0, 0, 1.0}}, {}, {}), InvalidParameterError);
    CHECK_THROWS_AS(Instance({{0, 1, -1.0}}, {}, {}), InvalidParameterError);
    CHECK_THROWS_AS(Instance({{0, 1, 1.0}}, {{0, {{2, 0.5}}}}, {}), InvalidParameterError);
    CHECK_THROWS_AS(Instance({{0, 1, 1.0}}, {{0, {{0, 1.5}}}}, {}), InvalidParameterError);
    // duplicate server on one request
    CHECK_THROWS_AS(Instance({{0, 1, 1.0}}, {{0, {{0, 0.5}, {0, 0.5}}}}, {}),
                    InvalidParameterError);
}
