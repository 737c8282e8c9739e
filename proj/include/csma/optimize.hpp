#pragma once

#include <array>
#include <string>
#include <vector>

#include "csma/chain.hpp"
#include "csma/config.hpp"

namespace csma {

// Projected gradient ascent on J(p) = sum_i alpha_i U(S_i(p)) with the chain
// engine as the throughput evaluator.

enum class UtilityKind { Log, Linear };

struct UtilitySpec {
    UtilityKind kind = UtilityKind::Log;
    double epsilon = 1e-9; // lower guard for the log argument
};

enum class StepRule { Fixed, Backtracking };
enum class GradMode { FiniteDifference, AnalyticPath3 };

struct OptimizerConfig {
    std::vector<double> alpha;
    UtilitySpec utility;
    double eta0 = 0.1;
    StepRule step_rule = StepRule::Backtracking;
    GradMode grad_mode = GradMode::FiniteDifference;
    double fd_h = 1e-5;
    int max_iters = 500;
    double tol = 1e-7;   // stop when ||p_{k+1} - p_k||_inf < tol
    // Projection box. The defaults keep log utility finite and the chain
    // ergodic; [0,1] remains available for linear utility.
    double p_lo = 1e-4;
    double p_hi = 1.0 - 1e-4;
    // Node ids whose p stays at its p0 value (bypasses projection); used to
    // pin nodes for throughput-region sweeps.
    std::vector<int> frozen;
};

struct OptimizerIterate {
    int k = 0;
    std::vector<double> p;
    std::vector<double> S;
    double J = 0.0;
};

struct OptimizerTrace {
    std::vector<OptimizerIterate> iterations;
    bool converged = false;
    std::string reason;
    OptimizerIterate final;
};

double utility_value(const UtilitySpec& u, double s);
double utility_derivative(const UtilitySpec& u, double s);

// Evaluates S via the chain engine, then J. tmpl supplies graph/T/sigma;
// tmpl.p is ignored in favor of p.
double objective(const std::vector<double>& p, const NetworkConfig& tmpl,
                 const OptimizerConfig& opt);

// dJ/dp. FiniteDifference: central differences (one-sided at the box edge),
// 2n engine evaluations. AnalyticPath3: closed-form Jacobian, only for the
// 3-node path graph with T = 2. Frozen coordinates get 0.
std::vector<double> gradient(const std::vector<double>& p, const NetworkConfig& tmpl,
                             const OptimizerConfig& opt);

// p^(k+1) = proj(p^(k) + eta_k dJ/dp). Backtracking halves eta (up to 30
// times) until J strictly improves, so J is non-decreasing along the trace;
// a step that cannot improve stops with converged=false and a reason.
OptimizerTrace optimize(const NetworkConfig& tmpl, const OptimizerConfig& opt,
                        std::vector<double> p0);

struct BoundaryPoint {
    std::vector<double> alpha;
    std::vector<double> p_star;
    std::vector<double> S_star;
    double J = 0.0;
    bool ok = false;
    std::string error; // set when the per-point optimization failed
};

// Runs optimize per weight vector; per-point failures are recorded and the
// sweep continues. Points come back in weight_grid order.
std::vector<BoundaryPoint> region_boundary(const NetworkConfig& tmpl,
                                           const std::vector<std::vector<double>>& weight_grid,
                                           const OptimizerConfig& opt,
                                           const std::vector<double>& p0);

// Closed forms for the 3-node path graph (edges 0-1, 1-2) at T = 2, used by
// the analytic gradient mode and as test oracles.
namespace path3 {

std::array<double, 3> throughput(const std::array<double, 3>& p);
// jac[i][j] = dS_i/dp_j
std::array<std::array<double, 3>, 3> jacobian(const std::array<double, 3>& p);
bool matches(const ConflictGraph& g); // true iff g is the 3-node path 0-1-2

} // namespace path3

} // namespace csma
