#include "csma/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace csma {

bool ConflictGraph::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

ConflictGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                         std::vector<std::string> names) {
    if (n < 1) throw std::invalid_argument("graph: node count must be >= 1");
    if (!names.empty() && static_cast<int>(names.size()) != n)
        throw std::invalid_argument("graph: names must have one entry per node");

    for (auto& [i, j] : edges) {
        if (i == j) throw std::invalid_argument("graph: self-loop at node " + std::to_string(i));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("graph: edge (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") out of range for n=" +
                                        std::to_string(n));
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    ConflictGraph g;
    g.n = n;
    g.edges = std::move(edges);
    g.names = std::move(names);
    g.adj.assign(static_cast<std::size_t>(n), {});
    for (auto [i, j] : g.edges) {
        g.adj[static_cast<std::size_t>(i)].push_back(j);
        g.adj[static_cast<std::size_t>(j)].push_back(i);
    }
    for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
    return g;
}

namespace {

ConflictGraph parse_json_graph(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("graph: bad JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer())
        throw std::invalid_argument("graph: expected object with integer field \"n\"");

    int n = doc["n"].get<int>();
    std::vector<std::pair<int, int>> edges;
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array()) throw std::invalid_argument("graph: \"edges\" must be an array");
        for (const auto& e : doc["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                throw std::invalid_argument("graph: each edge must be a pair of node ids");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }
    std::vector<std::string> names;
    if (doc.contains("names") && !doc["names"].is_null()) {
        if (!doc["names"].is_array()) throw std::invalid_argument("graph: \"names\" must be an array");
        for (const auto& s : doc["names"]) {
            if (!s.is_string()) throw std::invalid_argument("graph: names must be strings");
            names.push_back(s.get<std::string>());
        }
    }
    return make_graph(n, std::move(edges), std::move(names));
}

ConflictGraph parse_edge_list(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue; // blank line
        if (first.rfind("n=", 0) == 0) {
            try {
                n = std::stoi(first.substr(2));
            } catch (...) {
                throw std::invalid_argument("graph: bad header on line " + std::to_string(lineno));
            }
            continue;
        }
        if (n < 0)
            throw std::invalid_argument("graph: edge list must start with an n=<int> header");
        int i = 0, j = 0;
        try {
            i = std::stoi(first);
        } catch (...) {
            throw std::invalid_argument("graph: bad node id on line " + std::to_string(lineno));
        }
        if (!(ls >> j))
            throw std::invalid_argument("graph: expected \"i j\" on line " + std::to_string(lineno));
        std::string extra;
        if (ls >> extra)
            throw std::invalid_argument("graph: trailing tokens on line " + std::to_string(lineno));
        edges.emplace_back(i, j);
    }
    if (n < 0) throw std::invalid_argument("graph: missing n=<int> header");
    return make_graph(n, std::move(edges));
}

} // namespace

ConflictGraph parse_graph(std::string_view text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw std::invalid_argument("graph: empty document");
    if (text[first] == '{') return parse_json_graph(text);
    return parse_edge_list(text);
}

std::string serialize_graph(const ConflictGraph& g) {
    nlohmann::json doc;
    doc["n"] = g.n;
    auto edges = nlohmann::json::array();
    for (auto [i, j] : g.edges) edges.push_back({i, j});
    doc["edges"] = std::move(edges);
    if (!g.names.empty()) doc["names"] = g.names;
    return doc.dump();
}

ConflictGraph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("graph: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

ConflictGraph gen_erdos_renyi(int n, double q, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_erdos_renyi: n must be >= 1");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("gen_erdos_renyi: q must be in [0,1]");
    std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // mt19937 output is fully specified, so this is reproducible
            // across standard libraries for a fixed seed.
            double u = static_cast<double>(rng()) * 0x1p-32;
            if (u < q) edges.emplace_back(i, j);
        }
    }
    return make_graph(n, std::move(edges));
}

Topology topology_from_string(std::string_view s) {
    if (s == "star") return Topology::Star;
    if (s == "complete") return Topology::Complete;
    if (s == "path") return Topology::Path;
    if (s == "cycle") return Topology::Cycle;
    throw std::invalid_argument("unknown topology kind: " + std::string(s));
}

ConflictGraph gen_named(Topology kind, int n) {
    if (n < 1) throw std::invalid_argument("gen_named: n must be >= 1");
    std::vector<std::pair<int, int>> edges;
    switch (kind) {
    case Topology::Star:
        for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
        break;
    case Topology::Complete:
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
        break;
    case Topology::Path:
        for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
        break;
    case Topology::Cycle:
        for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
        if (n > 2) edges.emplace_back(0, n - 1);
        break;
    }
    return make_graph(n, std::move(edges));
}

} // namespace csma
