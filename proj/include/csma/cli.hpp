#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csma/optimize.hpp"
#include "csma/report.hpp"

namespace csma::cli {

// Exit codes: 0 success, 1 usage/parse error, 2 computational limit
// (state-space cap, solver non-convergence, periodic chain).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitLimit = 2;

struct ThroughputArgs {
    std::string graph_file;
    std::vector<double> p;          // one value broadcasts to all nodes
    int T = 2;
    double sigma = 1.0;
    std::vector<std::string> methods{"exact"}; // exact|product2|renewal|renewal-ext|sim
    std::uint64_t slots = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t cap = 2'000'000;
    std::string dump_chain; // optional path for the chain JSON dump
};

struct Table1Args {
    int n = 10;
    std::vector<double> q_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double p = 0.25; // uniform access probability
    int T = 2;
    std::uint64_t seed = 1;  // row r uses seed + r
    std::uint64_t slots = 1'000'000;
    std::string aggregate = "node0"; // node0|mean
    std::size_t cap = 2'000'000;
};

struct StarSweepArgs {
    int n = 5;
    std::vector<double> p; // one value broadcasts
    std::vector<int> T_list{2, 4, 8, 16};
    std::size_t cap = 2'000'000;
};

struct RegionArgs {
    std::string graph_file;
    std::vector<int> T_list{2, 4};
    std::vector<int> pin;       // node ids with p pinned to 0
    int node_i = -1, node_j = -1; // swept pair; default first two unpinned
    int grid = 11;              // weight points t = 0..1
    OptimizerConfig opt;        // alpha filled per point
    std::size_t cap = 2'000'000;
};

struct OptimizeArgs {
    std::string graph_file;
    int T = 2;
    std::vector<double> alpha;
    OptimizerConfig opt;
    std::vector<double> p0; // default mid-box
    std::string trace_file; // CSV: iter, p_0.., S_0.., J
    std::size_t cap = 2'000'000;
};

struct SimTraceArgs {
    std::string graph_file;
    std::vector<double> p;
    int T = 2;
    std::uint64_t slots = 100;
    std::uint64_t seed = 1;
};

ExperimentReport cmd_throughput(const ThroughputArgs& a);
ExperimentReport cmd_table1(const Table1Args& a);
ExperimentReport cmd_star_sweep(const StarSweepArgs& a);
ExperimentReport cmd_region(const RegionArgs& a);
ExperimentReport cmd_optimize(const OptimizeArgs& a, OptimizerTrace* trace_out = nullptr);

std::string optimizer_trace_csv(const OptimizerTrace& tr, int n);

// Full command-line front end (subcommands: gen, throughput, table1,
// star-sweep, region, optimize, sim-trace). Returns the process exit code.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace csma::cli
