#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "csma/graph.hpp"

using namespace csma;

TEST_CASE("parse_graph reads the JSON form") {
    auto g = parse_graph(R"({"n":3,"edges":[[0,1],[1,2]]})");
    CHECK(g.n == 3);
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(g.adj[1] == std::vector<int>{0, 2});
}

TEST_CASE("parse_graph accepts a single isolated node") {
    auto g = parse_graph(R"({"n":1,"edges":[]})");
    CHECK(g.n == 1);
    CHECK(g.edges.empty());
}

TEST_CASE("parse_graph deduplicates reversed and repeated edges") {
    auto g = parse_graph(R"({"n":3,"edges":[[0,1],[1,0]]})");
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}});
    auto g2 = parse_graph(R"({"n":3,"edges":[[0,1],[0,1],[2,1]]})");
    CHECK(g2.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
}

TEST_CASE("parse_graph rejects malformed input") {
    CHECK_THROWS_AS(parse_graph("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_graph(R"({"edges":[]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_graph(R"({"n":2,"edges":[[0,0]]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_graph(R"({"n":2,"edges":[[0,2]]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_graph(R"({"n":2,"edges":[[0]]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_graph(""), std::invalid_argument);
}

TEST_CASE("parse_graph reads edge-list text") {
    auto g = parse_graph("n=4\n0 1\n2 3  # far pair\n\n1 0\n");
    CHECK(g.n == 4);
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK_THROWS_AS(parse_graph("0 1\n"), std::invalid_argument); // missing header
    CHECK_THROWS_AS(parse_graph("n=2\n0\n"), std::invalid_argument);
}

TEST_CASE("serialize/parse round-trips, names included") {
    auto g = make_graph(3, {{0, 1}, {1, 2}}, {"a", "b", "c"});
    CHECK(parse_graph(serialize_graph(g)) == g);

    std::mt19937 rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        int n = 1 + static_cast<int>(rng() % 9);
        auto h = gen_erdos_renyi(n, 0.4, rng());
        CHECK(parse_graph(serialize_graph(h)) == h);
    }
}

TEST_CASE("gen_named produces the canonical topologies") {
    CHECK(gen_named(Topology::Star, 4).edges ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});
    CHECK(gen_named(Topology::Complete, 3).edges ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(gen_named(Topology::Path, 3).edges ==
          std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(gen_named(Topology::Cycle, 4).edges ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
    CHECK(gen_named(Topology::Cycle, 2).edges == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(gen_named(Topology::Path, 1).edges.empty());
    CHECK_THROWS_AS(topology_from_string("torus"), std::invalid_argument);
}

TEST_CASE("gen_erdos_renyi endpoints and determinism") {
    CHECK(gen_erdos_renyi(5, 0.0, 123).edges.empty());
    CHECK(gen_erdos_renyi(5, 1.0, 123).edges.size() == 10);
    CHECK(gen_erdos_renyi(10, 0.5, 42) == gen_erdos_renyi(10, 0.5, 42));
    CHECK(gen_erdos_renyi(10, 0.5, 42) != gen_erdos_renyi(10, 0.5, 43));
}

TEST_CASE("gen_erdos_renyi edge count matches the binomial mean") {
    // 45 candidate pairs at q = 0.5: mean edge count 22.5.
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        total += static_cast<double>(gen_erdos_renyi(10, 0.5, seed).edges.size());
    double mean = total / 1000.0;
    CHECK(std::fabs(mean - 22.5) <= 1.0);
}

TEST_CASE("adjacency is symmetric on generated graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto g = gen_erdos_renyi(8, 0.45, seed);
        for (int i = 0; i < g.n; ++i)
            for (int j : g.adj[static_cast<std::size_t>(i)]) {
                const auto& back = g.adj[static_cast<std::size_t>(j)];
                CHECK(std::find(back.begin(), back.end(), i) != back.end());
            }
    }
}
