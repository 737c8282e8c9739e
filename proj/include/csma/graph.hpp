#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace csma {

// Undirected interference graph over n transmitter nodes. Node ids are
// dense 0-based integers; an edge (i,j) means i and j cannot transmit
// simultaneously. Immutable after construction, safe to share across threads.
struct ConflictGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges; // normalized: i < j, sorted, unique
    std::vector<std::vector<int>> adj;      // sorted neighbor lists
    std::vector<std::string> names;         // empty, or one label per node

    bool has_edge(int i, int j) const;
    int degree(int i) const { return static_cast<int>(adj[i].size()); }

    bool operator==(const ConflictGraph& other) const {
        return n == other.n && edges == other.edges && names == other.names;
    }
};

// Validates, deduplicates reversed/duplicate edges, builds adjacency.
// Throws std::invalid_argument on self-loops or ids outside 0..n-1.
ConflictGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                         std::vector<std::string> names = {});

// Accepts either a JSON document {"n": int, "edges": [[i,j],...], "names": [...]}
// or edge-list text: a header line "n=<int>" followed by one "i j" pair per line
// ('#' starts a comment). Duplicate and reversed edges are deduplicated.
ConflictGraph parse_graph(std::string_view text);

// JSON form of the graph; parse_graph(serialize_graph(g)) == g.
std::string serialize_graph(const ConflictGraph& g);

ConflictGraph load_graph_file(const std::string& path);

// Each unordered pair is included independently with probability q.
// Deterministic for a fixed seed (mt19937, pairs scanned in (i,j) i<j order;
// bits of the raw 32-bit draws are mapped to [0,1)).
ConflictGraph gen_erdos_renyi(int n, double q, std::uint64_t seed);

enum class Topology { Star, Complete, Path, Cycle };

Topology topology_from_string(std::string_view s); // throws on unknown kind
ConflictGraph gen_named(Topology kind, int n);     // star: node 0 is the hub

} // namespace csma
