#include "csma/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "csma/chain.hpp"
#include "csma/errors.hpp"
#include "csma/graph.hpp"
#include "csma/parallel.hpp"
#include "csma/product_form.hpp"
#include "csma/renewal.hpp"
#include "csma/sim.hpp"

namespace csma::cli {

namespace {

const std::vector<std::string> kMethods = {"exact", "product2", "renewal", "renewal-ext", "sim"};

std::vector<double> broadcast_p(std::vector<double> p, int n, const char* who) {
    if (p.empty()) throw std::invalid_argument(std::string(who) + ": --p is required");
    if (static_cast<int>(p.size()) == 1 && n > 1) p.assign(static_cast<std::size_t>(n), p[0]);
    if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument(std::string(who) + ": --p needs 1 or " + std::to_string(n) +
                                    " values, got " + std::to_string(p.size()));
    return p;
}

ExperimentReport make_report(std::string command, const nlohmann::json& flags,
                             std::uint64_t seed) {
    ExperimentReport r;
    r.command = std::move(command);
    r.config_hash = hash_hex(flags.dump());
    r.seed = seed;
    r.timestamp = utc_timestamp_now();
    return r;
}

Cell err_cell(const std::exception& e) { return Cell{std::string("ERR: ") + e.what()}; }

std::string json_scalar_to_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Expands "--config file.json" into flag tokens before CLI11 sees the line.
// The file is a flat JSON object mirroring the subcommand's flags; keys
// already present on the command line are skipped, so explicit flags win.
std::vector<std::string> apply_config_files(std::vector<std::string> argv) {
    std::size_t insert_at = argv.size();
    nlohmann::json merged = nlohmann::json::object();
    for (std::size_t i = 0; i < argv.size();) {
        std::string path;
        if (argv[i] == "--config") {
            if (i + 1 >= argv.size())
                throw std::invalid_argument("--config requires a file path");
            path = argv[i + 1];
            argv.erase(argv.begin() + static_cast<std::ptrdiff_t>(i),
                       argv.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (argv[i].rfind("--config=", 0) == 0) {
            path = argv[i].substr(9);
            argv.erase(argv.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
            continue;
        }
        insert_at = std::min(insert_at, i);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object())
            throw std::invalid_argument("config " + path + " must be a JSON object of flags");
        for (auto& [key, value] : doc.items()) merged[key] = value; // later files win
    }
    if (merged.empty()) return argv;

    std::vector<std::string> injected;
    for (auto& [key, value] : merged.items()) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& tok : argv)
            if (tok == flag || tok.rfind(flag + "=", 0) == 0) given = true;
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                injected.push_back(flag);
                injected.push_back(json_scalar_to_string(v));
            }
        } else {
            injected.push_back(flag);
            injected.push_back(json_scalar_to_string(value));
        }
    }
    argv.insert(argv.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(),
                injected.end());
    return argv;
}

void emit_report(const ExperimentReport& r, const std::string& out_csv,
                 const std::string& out_json, bool quiet) {
    if (!quiet) std::cout << report_to_table(r);
    if (!out_csv.empty()) write_text_file(out_csv, report_to_csv(r));
    if (!out_json.empty()) write_text_file(out_json, report_to_json(r));
}

} // namespace

ExperimentReport cmd_throughput(const ThroughputArgs& a) {
    ConflictGraph g = load_graph_file(a.graph_file);
    NetworkConfig cfg{g, broadcast_p(a.p, g.n, "throughput"), a.T, a.sigma};
    cfg.validate();
    for (const auto& m : a.methods)
        if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
            throw std::invalid_argument("throughput: unknown method '" + m + "'");

    nlohmann::json flags{{"graph", serialize_graph(g)}, {"p", cfg.p},     {"T", a.T},
                         {"sigma", a.sigma},            {"methods", a.methods},
                         {"slots", a.slots},            {"seed", a.seed}, {"cap", a.cap}};
    ExperimentReport r = make_report("throughput", flags, a.seed);

    r.columns = {"node"};
    for (const auto& m : a.methods) {
        r.columns.push_back(m);
        if (m == "sim") r.columns.push_back("sim_ci");
    }

    std::vector<std::vector<Cell>> method_cols;
    for (const auto& m : a.methods) {
        std::vector<Cell> col(static_cast<std::size_t>(g.n));
        std::vector<Cell> ci;
        try {
            if (m == "exact") {
                auto S = exact_throughput(cfg, ChainLimits{a.cap});
                for (int i = 0; i < g.n; ++i) col[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i)];
            } else if (m == "product2") {
                auto S = throughput_closed_form(cfg);
                for (int i = 0; i < g.n; ++i) col[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i)];
            } else if (m == "renewal") {
                auto S = renewal_classic(cfg);
                for (int i = 0; i < g.n; ++i) col[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i)];
            } else if (m == "renewal-ext") {
                auto S = renewal_extended(cfg);
                for (int i = 0; i < g.n; ++i) col[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i)];
            } else {
                auto res = simulate(SimConfig{cfg, a.slots, a.seed});
                ci.resize(static_cast<std::size_t>(g.n));
                for (int i = 0; i < g.n; ++i) {
                    col[static_cast<std::size_t>(i)] = res.S_hat[static_cast<std::size_t>(i)];
                    ci[static_cast<std::size_t>(i)] = res.ci_halfwidth[static_cast<std::size_t>(i)];
                }
            }
        } catch (const cap_exceeded_error&) {
            throw; // hard limit: surface as exit code 2 rather than a marker
        }
        method_cols.push_back(std::move(col));
        if (m == "sim") method_cols.push_back(std::move(ci));
    }

    for (int i = 0; i < g.n; ++i) {
        std::vector<Cell> row{Cell{static_cast<double>(i)}};
        for (const auto& colv : method_cols) row.push_back(colv[static_cast<std::size_t>(i)]);
        r.add_row(std::move(row));
    }

    if (!a.dump_chain.empty())
        write_text_file(a.dump_chain, chain_to_json(build_chain(cfg, ChainLimits{a.cap})));
    return r;
}

ExperimentReport cmd_table1(const Table1Args& a) {
    if (a.n < 1) throw std::invalid_argument("table1: n must be >= 1");
    if (a.aggregate != "node0" && a.aggregate != "mean")
        throw std::invalid_argument("table1: --aggregate must be node0 or mean");
    for (double q : a.q_list)
        if (!(q >= 0.0 && q <= 1.0))
            throw std::invalid_argument("table1: edge probabilities must be in [0,1]");

    nlohmann::json flags{{"n", a.n},       {"q_list", a.q_list}, {"p", a.p},
                         {"T", a.T},       {"seed", a.seed},     {"slots", a.slots},
                         {"aggregate", a.aggregate}};
    ExperimentReport r = make_report("table1", flags, a.seed);
    r.columns = {"edge_prob", "sim", "renewal_classic", "renewal_ext", "markov", "sim_ci",
                 "agree_3ci"};

    auto aggregate = [&](const std::vector<double>& v) {
        if (a.aggregate == "node0") return v[0];
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    std::vector<std::vector<Cell>> rows(a.q_list.size());
    parallel_for(a.q_list.size(), [&](std::size_t k) {
        const double q = a.q_list[k];
        try {
            ConflictGraph g = gen_erdos_renyi(a.n, q, a.seed + k);
            NetworkConfig cfg{g, std::vector<double>(static_cast<std::size_t>(a.n), a.p), a.T, 1.0};
            auto sim = simulate(SimConfig{cfg, a.slots, a.seed + k});
            auto classic = renewal_classic(cfg);
            auto extended = renewal_extended(cfg);
            auto exact = exact_throughput(cfg, ChainLimits{a.cap});
            bool agree = true;
            for (int i = 0; i < a.n; ++i)
                agree = agree &&
                        std::fabs(sim.S_hat[static_cast<std::size_t>(i)] -
                                  exact[static_cast<std::size_t>(i)]) <=
                            3.0 * sim.ci_halfwidth[static_cast<std::size_t>(i)];
            rows[k] = {Cell{q},
                       Cell{aggregate(sim.S_hat)},
                       Cell{aggregate(classic)},
                       Cell{aggregate(extended)},
                       Cell{aggregate(exact)},
                       Cell{aggregate(sim.ci_halfwidth)},
                       Cell{agree ? 1.0 : 0.0}};
        } catch (const std::exception& e) {
            rows[k] = {Cell{q}, err_cell(e), err_cell(e), err_cell(e), err_cell(e), err_cell(e),
                       err_cell(e)};
        }
    });
    for (auto& row : rows) r.add_row(std::move(row));
    return r;
}

ExperimentReport cmd_star_sweep(const StarSweepArgs& a) {
    if (a.n < 2) throw std::invalid_argument("star-sweep: star needs n >= 2");
    ConflictGraph g = gen_named(Topology::Star, a.n);
    std::vector<double> p = broadcast_p(a.p.empty() ? std::vector<double>{0.3} : a.p, a.n,
                                        "star-sweep");

    nlohmann::json flags{{"n", a.n}, {"p", p}, {"T_list", a.T_list}};
    ExperimentReport r = make_report("star-sweep", flags, 0);
    r.columns = {"T",        "exact_hub",       "exact_periph", "renewal_ext_hub",
                 "renewal_ext_periph", "periph_underestimate"};

    std::vector<std::vector<Cell>> rows(a.T_list.size());
    parallel_for(a.T_list.size(), [&](std::size_t k) {
        const int T = a.T_list[k];
        try {
            NetworkConfig cfg{g, p, T, 1.0};
            auto exact = exact_throughput(cfg, ChainLimits{a.cap});
            auto ext = renewal_extended(cfg);
            const double under = (exact[1] - ext[1]) / exact[1];
            rows[k] = {Cell{static_cast<double>(T)}, Cell{exact[0]}, Cell{exact[1]},
                       Cell{ext[0]},                 Cell{ext[1]},   Cell{under}};
        } catch (const std::exception& e) {
            rows[k] = {Cell{static_cast<double>(T)}, err_cell(e), err_cell(e), err_cell(e),
                       err_cell(e),                  err_cell(e)};
        }
    });
    for (auto& row : rows) r.add_row(std::move(row));
    return r;
}

ExperimentReport cmd_region(const RegionArgs& a) {
    ConflictGraph g = load_graph_file(a.graph_file);
    if (a.grid < 2) throw std::invalid_argument("region: --grid must be >= 2");
    for (int id : a.pin)
        if (id < 0 || id >= g.n) throw std::invalid_argument("region: pinned id out of range");

    int node_i = a.node_i, node_j = a.node_j;
    if (node_i < 0 || node_j < 0) {
        std::vector<int> free_nodes;
        for (int i = 0; i < g.n; ++i)
            if (std::find(a.pin.begin(), a.pin.end(), i) == a.pin.end()) free_nodes.push_back(i);
        if (free_nodes.size() < 2)
            throw std::invalid_argument("region: need at least two unpinned nodes");
        node_i = free_nodes[0];
        node_j = free_nodes[1];
    }
    if (node_i == node_j || node_i >= g.n || node_j >= g.n)
        throw std::invalid_argument("region: swept pair must be two distinct nodes");

    nlohmann::json flags{{"graph", serialize_graph(g)}, {"T_list", a.T_list}, {"pin", a.pin},
                         {"i", node_i},                 {"j", node_j},        {"grid", a.grid}};
    ExperimentReport r = make_report("region", flags, 0);
    r.columns = {"T", "t", "alpha_i", "alpha_j", "S_i", "S_j", "J", "status"};
    for (int i = 0; i < g.n; ++i) r.columns.push_back("p" + std::to_string(i));

    std::vector<std::vector<double>> weight_grid;
    for (int k = 0; k < a.grid; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(a.grid - 1);
        std::vector<double> alpha(static_cast<std::size_t>(g.n), 0.0);
        alpha[static_cast<std::size_t>(node_i)] = t;
        alpha[static_cast<std::size_t>(node_j)] = 1.0 - t;
        weight_grid.push_back(std::move(alpha));
    }

    std::vector<double> p0(static_cast<std::size_t>(g.n), 0.5);
    for (int id : a.pin) p0[static_cast<std::size_t>(id)] = 0.0;
    OptimizerConfig opt = a.opt;
    opt.frozen = a.pin;

    for (int T : a.T_list) {
        NetworkConfig tmpl{g, p0, T, 1.0};
        auto points = region_boundary(tmpl, weight_grid, opt, p0);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const auto& pt = points[k];
            const double t = static_cast<double>(k) / static_cast<double>(a.grid - 1);
            std::vector<Cell> row{Cell{static_cast<double>(T)},
                                  Cell{t},
                                  Cell{pt.alpha[static_cast<std::size_t>(node_i)]},
                                  Cell{pt.alpha[static_cast<std::size_t>(node_j)]}};
            if (pt.ok) {
                row.push_back(Cell{pt.S_star[static_cast<std::size_t>(node_i)]});
                row.push_back(Cell{pt.S_star[static_cast<std::size_t>(node_j)]});
                row.push_back(Cell{pt.J});
                row.push_back(Cell{std::string("ok")});
                for (double v : pt.p_star) row.push_back(Cell{v});
            } else {
                row.push_back(Cell{std::string("ERR: ") + pt.error});
                row.push_back(Cell{std::string("ERR: ") + pt.error});
                row.push_back(Cell{std::string("ERR: ") + pt.error});
                row.push_back(Cell{std::string("failed")});
                for (int i = 0; i < g.n; ++i) row.push_back(Cell{std::string("")});
            }
            r.add_row(std::move(row));
        }
    }
    return r;
}

ExperimentReport cmd_optimize(const OptimizeArgs& a, OptimizerTrace* trace_out) {
    ConflictGraph g = load_graph_file(a.graph_file);
    OptimizerConfig opt = a.opt;
    if (static_cast<int>(a.alpha.size()) != g.n)
        throw std::invalid_argument("optimize: --alpha needs one weight per node");
    opt.alpha = a.alpha;

    std::vector<double> p0 = a.p0;
    if (p0.empty()) p0.assign(static_cast<std::size_t>(g.n), 0.5);
    if (static_cast<int>(p0.size()) == 1 && g.n > 1) p0.assign(static_cast<std::size_t>(g.n), p0[0]);
    if (static_cast<int>(p0.size()) != g.n)
        throw std::invalid_argument("optimize: --p0 needs 1 or n values");

    nlohmann::json flags{{"graph", serialize_graph(g)},
                         {"T", a.T},
                         {"alpha", a.alpha},
                         {"utility", opt.utility.kind == UtilityKind::Log ? "log" : "linear"},
                         {"eta0", opt.eta0},
                         {"step_rule", opt.step_rule == StepRule::Fixed ? "fixed" : "backtracking"},
                         {"max_iters", opt.max_iters},
                         {"tol", opt.tol},
                         {"p0", p0}};
    ExperimentReport r = make_report("optimize", flags, 0);

    NetworkConfig tmpl{g, p0, a.T, 1.0};
    OptimizerTrace tr = optimize(tmpl, opt, p0);
    if (trace_out) *trace_out = tr;

    r.columns = {"node", "p0", "p_star", "S_star", "J", "converged", "iterations"};
    for (int i = 0; i < g.n; ++i) {
        r.add_row({Cell{static_cast<double>(i)}, Cell{p0[static_cast<std::size_t>(i)]},
                   Cell{tr.final.p[static_cast<std::size_t>(i)]},
                   Cell{tr.final.S[static_cast<std::size_t>(i)]}, Cell{tr.final.J},
                   Cell{tr.converged ? 1.0 : 0.0},
                   Cell{static_cast<double>(tr.iterations.size() - 1)}});
    }
    return r;
}

std::string optimizer_trace_csv(const OptimizerTrace& tr, int n) {
    std::ostringstream out;
    out << "iter";
    for (int i = 0; i < n; ++i) out << ",p_" << i;
    for (int i = 0; i < n; ++i) out << ",S_" << i;
    out << ",J\n";
    for (const auto& it : tr.iterations) {
        out << it.k;
        for (int i = 0; i < n; ++i) out << ',' << format_g9(it.p[static_cast<std::size_t>(i)]);
        for (int i = 0; i < n; ++i) out << ',' << format_g9(it.S[static_cast<std::size_t>(i)]);
        out << ',' << format_g9(it.J) << '\n';
    }
    return out.str();
}

namespace {

void add_optimizer_flags(CLI::App* sub, OptimizerConfig& opt, std::string& utility,
                         std::string& step_rule, std::string& grad_mode) {
    sub->add_option("--utility", utility, "Utility function: log|linear");
    sub->add_option("--epsilon", opt.utility.epsilon, "Lower guard for the log argument");
    sub->add_option("--eta0", opt.eta0, "Initial step size");
    sub->add_option("--step-rule", step_rule, "Step rule: backtracking|fixed");
    sub->add_option("--grad-mode", grad_mode, "Gradient mode: fd|analytic-path3");
    sub->add_option("--fd-h", opt.fd_h, "Finite-difference step");
    sub->add_option("--max-iters", opt.max_iters, "Iteration limit");
    sub->add_option("--tol", opt.tol, "Stop when the p step falls below this");
    sub->add_option("--p-bounds", [&opt](const std::vector<std::string>& vals) {
        if (vals.size() != 2) return false;
        opt.p_lo = std::stod(vals[0]);
        opt.p_hi = std::stod(vals[1]);
        return true;
    }, "Projection box lo,hi")->delimiter(',')->expected(2);
}

void apply_optimizer_strings(OptimizerConfig& opt, const std::string& utility,
                             const std::string& step_rule, const std::string& grad_mode) {
    if (utility == "log")
        opt.utility.kind = UtilityKind::Log;
    else if (utility == "linear")
        opt.utility.kind = UtilityKind::Linear;
    else
        throw std::invalid_argument("unknown utility '" + utility + "'");
    if (step_rule == "backtracking")
        opt.step_rule = StepRule::Backtracking;
    else if (step_rule == "fixed")
        opt.step_rule = StepRule::Fixed;
    else
        throw std::invalid_argument("unknown step rule '" + step_rule + "'");
    if (grad_mode == "fd")
        opt.grad_mode = GradMode::FiniteDifference;
    else if (grad_mode == "analytic-path3")
        opt.grad_mode = GradMode::AnalyticPath3;
    else
        throw std::invalid_argument("unknown gradient mode '" + grad_mode + "'");
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"saturation throughput of heterogeneous p-persistent CSMA on conflict graphs"};
    app.require_subcommand(1);

    std::string out_csv, out_json, config_doc;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_csv, "Write the report as CSV");
        sub->add_option("--json", out_json, "Write the report as JSON");
        sub->add_flag("--quiet", quiet, "Suppress the stdout table");
        // consumed in a pre-parse pass; declared here for --help only
        sub->add_option("--config", config_doc,
                        "JSON file with flag values (explicit flags override it)");
    };

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a conflict graph file");
    std::string gen_kind = "star", gen_out;
    int gen_n = 5;
    double gen_q = 0.5;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind, "star|complete|path|cycle|er");
    gen->add_option("--n", gen_n, "Node count")->check(CLI::PositiveNumber);
    gen->add_option("--q", gen_q, "Edge probability (er only)");
    gen->add_option("--seed", gen_seed, "RNG seed (er only)");
    gen->add_option("--out", gen_out, "Output path (stdout if omitted)");

    // throughput
    auto* tp = app.add_subcommand("throughput", "Per-node saturation throughput by any method");
    ThroughputArgs tp_args;
    tp->add_option("--graph", tp_args.graph_file, "Graph file (JSON or edge list)")->required();
    tp->add_option("--p", tp_args.p, "Access probabilities (single value broadcasts)")
        ->delimiter(',');
    tp->add_option("--T", tp_args.T, "Packet duration in slots");
    tp->add_option("--sigma", tp_args.sigma, "Idle slot duration (renewal formulas only)");
    tp->add_option("--method", tp_args.methods, "exact|product2|renewal|renewal-ext|sim")
        ->delimiter(',');
    tp->add_option("--slots", tp_args.slots, "Simulation slots (sim)");
    tp->add_option("--seed", tp_args.seed, "Simulation seed (sim)");
    tp->add_option("--cap", tp_args.cap, "State-space cap for the exact engine");
    tp->add_option("--dump-chain", tp_args.dump_chain, "Write the chain as JSON to this path");
    add_common(tp);

    // table1
    auto* t1 = app.add_subcommand("table1",
                                  "Edge-probability sweep over Erdos-Renyi graphs, all methods");
    Table1Args t1_args;
    t1->add_option("--n", t1_args.n, "Node count");
    t1->add_option("--q-list", t1_args.q_list, "Edge probabilities")->delimiter(',');
    t1->add_option("--p", t1_args.p, "Uniform access probability");
    t1->add_option("--T", t1_args.T, "Packet duration in slots");
    t1->add_option("--seed", t1_args.seed, "Base seed; row r uses seed+r");
    t1->add_option("--slots", t1_args.slots, "Simulation slots per row");
    t1->add_option("--aggregate", t1_args.aggregate, "Reported value: node0|mean");
    t1->add_option("--cap", t1_args.cap, "State-space cap");
    add_common(t1);

    // star-sweep
    auto* ss = app.add_subcommand("star-sweep",
                                  "Exact vs extended-renewal throughput on a star, sweeping T");
    StarSweepArgs ss_args;
    ss->add_option("--n", ss_args.n, "Star size (node 0 is the hub)");
    ss->add_option("--p", ss_args.p, "Access probabilities (single value broadcasts)")
        ->delimiter(',');
    ss->add_option("--T-list", ss_args.T_list, "Packet durations")->delimiter(',');
    ss->add_option("--cap", ss_args.cap, "State-space cap");
    add_common(ss);

    // region
    auto* rg = app.add_subcommand("region", "Throughput-region boundary via weight sweeps");
    RegionArgs rg_args;
    rg_args.opt.utility.kind = UtilityKind::Linear;
    std::string rg_utility = "linear", rg_step = "backtracking", rg_grad = "fd";
    rg->add_option("--graph", rg_args.graph_file, "Graph file")->required();
    rg->add_option("--T-list", rg_args.T_list, "Packet durations")->delimiter(',');
    rg->add_option("--pin", rg_args.pin, "Node ids pinned to p = 0")->delimiter(',');
    rg->add_option("--i", rg_args.node_i, "First swept node (default: first unpinned)");
    rg->add_option("--j", rg_args.node_j, "Second swept node (default: second unpinned)");
    rg->add_option("--grid", rg_args.grid, "Number of weight points");
    rg->add_option("--cap", rg_args.cap, "State-space cap");
    add_optimizer_flags(rg, rg_args.opt, rg_utility, rg_step, rg_grad);
    add_common(rg);

    // optimize
    auto* op = app.add_subcommand("optimize", "Maximize weighted utility of throughput over p");
    OptimizeArgs op_args;
    std::string op_utility = "log", op_step = "backtracking", op_grad = "fd";
    op->add_option("--graph", op_args.graph_file, "Graph file")->required();
    op->add_option("--T", op_args.T, "Packet duration in slots");
    op->add_option("--alpha", op_args.alpha, "Per-node weights")->required()->delimiter(',');
    op->add_option("--p0", op_args.p0, "Start point (single value broadcasts; default 0.5)")
        ->delimiter(',');
    op->add_option("--trace", op_args.trace_file, "Write per-iteration CSV trace here");
    op->add_option("--cap", op_args.cap, "State-space cap");
    add_optimizer_flags(op, op_args.opt, op_utility, op_step, op_grad);
    add_common(op);

    // sim-trace
    auto* st = app.add_subcommand("sim-trace", "Per-slot event log of a seeded simulation");
    SimTraceArgs st_args;
    std::string st_out;
    st->add_option("--graph", st_args.graph_file, "Graph file")->required();
    st->add_option("--p", st_args.p, "Access probabilities (single value broadcasts)")
        ->delimiter(',');
    st->add_option("--T", st_args.T, "Packet duration in slots");
    st->add_option("--slots", st_args.slots, "Slots to trace (max 10^4)");
    st->add_option("--seed", st_args.seed, "Simulation seed");
    st->add_option("--out", st_out, "Output path for JSON lines (stdout if omitted)");

    try {
        std::vector<std::string> expanded = apply_config_files(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(std::move(reversed));

        if (gen->parsed()) {
            ConflictGraph g = gen_kind == "er" ? gen_erdos_renyi(gen_n, gen_q, gen_seed)
                                               : gen_named(topology_from_string(gen_kind), gen_n);
            std::string text = serialize_graph(g);
            if (gen_out.empty())
                std::cout << text << '\n';
            else
                write_text_file(gen_out, text);
            return kExitOk;
        }
        if (tp->parsed()) {
            emit_report(cmd_throughput(tp_args), out_csv, out_json, quiet);
            return kExitOk;
        }
        if (t1->parsed()) {
            emit_report(cmd_table1(t1_args), out_csv, out_json, quiet);
            return kExitOk;
        }
        if (ss->parsed()) {
            emit_report(cmd_star_sweep(ss_args), out_csv, out_json, quiet);
            return kExitOk;
        }
        if (rg->parsed()) {
            apply_optimizer_strings(rg_args.opt, rg_utility, rg_step, rg_grad);
            emit_report(cmd_region(rg_args), out_csv, out_json, quiet);
            return kExitOk;
        }
        if (op->parsed()) {
            apply_optimizer_strings(op_args.opt, op_utility, op_step, op_grad);
            OptimizerTrace tr;
            emit_report(cmd_optimize(op_args, &tr), out_csv, out_json, quiet);
            if (!op_args.trace_file.empty())
                write_text_file(op_args.trace_file,
                                optimizer_trace_csv(tr, static_cast<int>(tr.final.p.size())));
            return kExitOk;
        }
        if (st->parsed()) {
            ConflictGraph g = load_graph_file(st_args.graph_file);
            NetworkConfig cfg{g, broadcast_p(st_args.p, g.n, "sim-trace"), st_args.T, 1.0};
            SimTrace tr = trace(SimConfig{cfg, st_args.slots, st_args.seed},
                                static_cast<std::size_t>(st_args.slots));
            std::string text = trace_to_jsonl(tr);
            if (st_out.empty())
                std::cout << text;
            else
                write_text_file(st_out, text);
            return kExitOk;
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const cap_exceeded_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitLimit;
    } catch (const convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitLimit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace csma::cli
