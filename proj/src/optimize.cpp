#include "csma/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csma/parallel.hpp"

namespace csma {

namespace path3 {

bool matches(const ConflictGraph& g) {
    return g.n == 3 && g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}};
}

// S_0 = 2 p0 q1 (1+p2) / Z,  S_1 = 2 q0 p1 q2 / Z,  S_2 = 2 p2 q1 (1+p0) / Z
// with Z = 1 + q1 p2 + q1 p0 + p1 + q1 p0 p2 and q_i = 1 - p_i.
std::array<double, 3> throughput(const std::array<double, 3>& p) {
    const double q0 = 1.0 - p[0], q1 = 1.0 - p[1], q2 = 1.0 - p[2];
    const double Z = 1.0 + q1 * p[2] + q1 * p[0] + p[1] + q1 * p[0] * p[2];
    return {2.0 * p[0] * q1 * (1.0 + p[2]) / Z, 2.0 * q0 * p[1] * q2 / Z,
            2.0 * p[2] * q1 * (1.0 + p[0]) / Z};
}

std::array<std::array<double, 3>, 3> jacobian(const std::array<double, 3>& p) {
    const double q0 = 1.0 - p[0], q1 = 1.0 - p[1], q2 = 1.0 - p[2];
    const double Z = 1.0 + q1 * p[2] + q1 * p[0] + p[1] + q1 * p[0] * p[2];

    const double N0 = 2.0 * p[0] * q1 * (1.0 + p[2]);
    const double N1 = 2.0 * q0 * p[1] * q2;
    const double N2 = 2.0 * p[2] * q1 * (1.0 + p[0]);

    const std::array<double, 3> dZ = {q1 * (1.0 + p[2]),
                                      1.0 - p[0] - p[2] - p[0] * p[2],
                                      q1 * (1.0 + p[0])};
    const std::array<double, 3> dN0 = {2.0 * q1 * (1.0 + p[2]), -2.0 * p[0] * (1.0 + p[2]),
                                       2.0 * p[0] * q1};
    const std::array<double, 3> dN1 = {-2.0 * p[1] * q2, 2.0 * q0 * q2, -2.0 * q0 * p[1]};
    const std::array<double, 3> dN2 = {2.0 * p[2] * q1, -2.0 * p[2] * (1.0 + p[0]),
                                       2.0 * q1 * (1.0 + p[0])};

    std::array<std::array<double, 3>, 3> jac{};
    const std::array<const std::array<double, 3>*, 3> dN = {&dN0, &dN1, &dN2};
    const std::array<double, 3> N = {N0, N1, N2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                ((*dN[static_cast<std::size_t>(i)])[static_cast<std::size_t>(j)] * Z -
                 N[static_cast<std::size_t>(i)] * dZ[static_cast<std::size_t>(j)]) /
                (Z * Z);
    return jac;
}

} // namespace path3

double utility_value(const UtilitySpec& u, double s) {
    if (u.kind == UtilityKind::Linear) return s;
    return std::log(std::max(s, u.epsilon));
}

double utility_derivative(const UtilitySpec& u, double s) {
    if (u.kind == UtilityKind::Linear) return 1.0;
    return s > u.epsilon ? 1.0 / s : 0.0; // clamped region of ln(max(s, eps)) is flat
}

namespace {

void check_opt(const NetworkConfig& tmpl, const OptimizerConfig& opt) {
    if (static_cast<int>(opt.alpha.size()) != tmpl.graph.n)
        throw std::invalid_argument("optimizer: alpha must have one weight per node");
    for (double a : opt.alpha)
        if (a < 0.0) throw std::invalid_argument("optimizer: weights must be nonnegative");
    if (!(opt.eta0 >= 0.0)) throw std::invalid_argument("optimizer: eta0 must be >= 0");
    if (!(opt.p_lo >= 0.0 && opt.p_lo < opt.p_hi && opt.p_hi <= 1.0))
        throw std::invalid_argument("optimizer: projection box must satisfy 0 <= lo < hi <= 1");
    if (!(opt.fd_h > 0.0 && opt.fd_h <= 1e-2))
        throw std::invalid_argument("optimizer: fd_h must be in (0, 1e-2]");
    if (opt.utility.kind == UtilityKind::Log && !(opt.utility.epsilon > 0.0))
        throw std::invalid_argument("optimizer: log utility needs epsilon > 0");
    for (int i : opt.frozen)
        if (i < 0 || i >= tmpl.graph.n)
            throw std::invalid_argument("optimizer: frozen node id out of range");
}

struct Evaluation {
    std::vector<double> S;
    double J = 0.0;
};

Evaluation evaluate(const std::vector<double>& p, const NetworkConfig& tmpl,
                    const OptimizerConfig& opt) {
    NetworkConfig cfg = tmpl;
    cfg.p = p;
    Evaluation ev;
    ev.S = exact_throughput(cfg);
    for (int i = 0; i < tmpl.graph.n; ++i)
        ev.J += opt.alpha[static_cast<std::size_t>(i)] *
                utility_value(opt.utility, ev.S[static_cast<std::size_t>(i)]);
    return ev;
}

bool is_frozen(const OptimizerConfig& opt, int i) {
    return std::find(opt.frozen.begin(), opt.frozen.end(), i) != opt.frozen.end();
}

std::vector<double> project(const std::vector<double>& x, const std::vector<double>& anchor,
                            const OptimizerConfig& opt) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (is_frozen(opt, static_cast<int>(i)))
            out[i] = anchor[i];
        else
            out[i] = std::clamp(x[i], opt.p_lo, opt.p_hi);
    }
    return out;
}

double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

} // namespace

double objective(const std::vector<double>& p, const NetworkConfig& tmpl,
                 const OptimizerConfig& opt) {
    check_opt(tmpl, opt);
    return evaluate(p, tmpl, opt).J;
}

std::vector<double> gradient(const std::vector<double>& p, const NetworkConfig& tmpl,
                             const OptimizerConfig& opt) {
    check_opt(tmpl, opt);
    const int n = tmpl.graph.n;
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);

    if (opt.grad_mode == GradMode::AnalyticPath3) {
        if (!path3::matches(tmpl.graph) || tmpl.T != 2)
            throw std::invalid_argument(
                "gradient: analytic mode covers only the 3-node path graph with T = 2");
        const std::array<double, 3> pa = {p[0], p[1], p[2]};
        const auto S = path3::throughput(pa);
        const auto jac = path3::jacobian(pa);
        for (int j = 0; j < 3; ++j) {
            if (is_frozen(opt, j)) continue;
            double acc = 0.0;
            for (int i = 0; i < 3; ++i)
                acc += opt.alpha[static_cast<std::size_t>(i)] *
                       utility_derivative(opt.utility, S[static_cast<std::size_t>(i)]) *
                       jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            g[static_cast<std::size_t>(j)] = acc;
        }
        return g;
    }

    // Central differences, one-sided at the box edge. The 2n evaluations are
    // independent engine calls.
    struct Probe {
        int coord;
        double scale; // contribution weight of this evaluation
        std::vector<double> point;
    };
    std::vector<Probe> probes;
    for (int j = 0; j < n; ++j) {
        if (is_frozen(opt, j)) continue;
        const auto idx = static_cast<std::size_t>(j);
        const double h = opt.fd_h;
        double lo = p[idx] - h, hi = p[idx] + h;
        if (lo >= opt.p_lo && hi <= opt.p_hi) {
            auto up = p, dn = p;
            up[idx] = hi;
            dn[idx] = lo;
            probes.push_back({j, +1.0 / (2.0 * h), std::move(up)});
            probes.push_back({j, -1.0 / (2.0 * h), std::move(dn)});
        } else if (hi <= opt.p_hi) { // forward difference
            auto up = p;
            up[idx] = hi;
            probes.push_back({j, +1.0 / h, std::move(up)});
            probes.push_back({j, -1.0 / h, p});
        } else { // backward difference
            auto dn = p;
            dn[idx] = lo;
            probes.push_back({j, +1.0 / h, p});
            probes.push_back({j, -1.0 / h, std::move(dn)});
        }
    }
    std::vector<double> J(probes.size());
    std::vector<std::exception_ptr> errors(probes.size());
    parallel_for(probes.size(), [&](std::size_t k) {
        try {
            J[k] = evaluate(probes[k].point, tmpl, opt).J;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    for (std::size_t k = 0; k < probes.size(); ++k)
        g[static_cast<std::size_t>(probes[k].coord)] += probes[k].scale * J[k];
    return g;
}

OptimizerTrace optimize(const NetworkConfig& tmpl, const OptimizerConfig& opt,
                        std::vector<double> p0) {
    check_opt(tmpl, opt);
    if (static_cast<int>(p0.size()) != tmpl.graph.n)
        throw std::invalid_argument("optimize: p0 must have one entry per node");
    std::vector<double> p = project(p0, p0, opt);

    OptimizerTrace tr;
    Evaluation cur = evaluate(p, tmpl, opt);
    tr.iterations.push_back({0, p, cur.S, cur.J});

    for (int k = 1; k <= opt.max_iters; ++k) {
        std::vector<double> g = gradient(p, tmpl, opt);

        std::vector<double> cand(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) cand[i] = p[i] + opt.eta0 * g[i];
        cand = project(cand, p, opt);
        if (inf_dist(cand, p) < opt.tol) {
            tr.converged = true;
            tr.reason = "step below tolerance";
            break;
        }

        Evaluation next;
        if (opt.step_rule == StepRule::Fixed) {
            next = evaluate(cand, tmpl, opt);
        } else {
            double eta = opt.eta0;
            bool accepted = false;
            for (int halvings = 0; halvings <= 30; ++halvings) {
                for (std::size_t i = 0; i < p.size(); ++i) cand[i] = p[i] + eta * g[i];
                cand = project(cand, p, opt);
                next = evaluate(cand, tmpl, opt);
                if (next.J > cur.J) {
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) {
                tr.converged = false;
                tr.reason = "no improving step after 30 halvings";
                tr.final = tr.iterations.back();
                return tr;
            }
        }

        const double moved = inf_dist(cand, p);
        p = std::move(cand);
        cur = std::move(next);
        tr.iterations.push_back({k, p, cur.S, cur.J});
        if (moved < opt.tol) {
            tr.converged = true;
            tr.reason = "step below tolerance";
            break;
        }
    }
    if (!tr.converged && tr.reason.empty()) tr.reason = "max iterations reached";
    tr.final = tr.iterations.back();
    return tr;
}

std::vector<BoundaryPoint> region_boundary(const NetworkConfig& tmpl,
                                           const std::vector<std::vector<double>>& weight_grid,
                                           const OptimizerConfig& opt,
                                           const std::vector<double>& p0) {
    std::vector<BoundaryPoint> points(weight_grid.size());
    parallel_for(weight_grid.size(), [&](std::size_t w) {
        BoundaryPoint& pt = points[w];
        pt.alpha = weight_grid[w];
        try {
            OptimizerConfig local = opt;
            local.alpha = weight_grid[w];
            OptimizerTrace tr = optimize(tmpl, local, p0);
            pt.p_star = tr.final.p;
            pt.S_star = tr.final.S;
            pt.J = tr.final.J;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
    });
    return points;
}

} // namespace csma
