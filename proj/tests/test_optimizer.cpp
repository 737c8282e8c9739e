#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "csma/optimize.hpp"

using namespace csma;

namespace {

NetworkConfig path3_tmpl(int T = 2) {
    return {gen_named(Topology::Path, 3), {0.5, 0.5, 0.5}, T, 1.0};
}

OptimizerConfig base_opt(std::vector<double> alpha) {
    OptimizerConfig opt;
    opt.alpha = std::move(alpha);
    return opt;
}

} // namespace

TEST_CASE("objective = weighted utility of engine throughput") {
    auto tmpl = path3_tmpl();

    auto linear0 = base_opt({1.0, 0.0, 0.0});
    linear0.utility.kind = UtilityKind::Linear;
    std::vector<double> p{0.5, 0.5, 0.5};
    CHECK(objective(p, tmpl, linear0) == doctest::Approx(6.0 / 17.0).epsilon(1e-12));

    auto logw = base_opt({0.6, 0.6, 0.3});
    const double want =
        0.6 * std::log(6.0 / 17.0) + 0.6 * std::log(2.0 / 17.0) + 0.3 * std::log(6.0 / 17.0);
    CHECK(objective(p, tmpl, logw) == doctest::Approx(want).epsilon(1e-12));

    auto zero = base_opt({0.0, 0.0, 0.0});
    CHECK(objective(p, tmpl, zero) == 0.0);
}

TEST_CASE("path3 closed forms match the engine") {
    CHECK(path3::matches(gen_named(Topology::Path, 3)));
    CHECK_FALSE(path3::matches(gen_named(Topology::Complete, 3)));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    auto tmpl = path3_tmpl();
    for (int rep = 0; rep < 20; ++rep) {
        std::array<double, 3> p{unif(rng), unif(rng), unif(rng)};
        auto S = path3::throughput(p);
        NetworkConfig cfg = tmpl;
        cfg.p = {p[0], p[1], p[2]};
        auto exact = exact_throughput(cfg);
        for (int i = 0; i < 3; ++i)
            CHECK(S[static_cast<std::size_t>(i)] ==
                  doctest::Approx(exact[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("single-node linear gradient matches the closed-form derivative") {
    for (int T : {2, 3, 5}) {
        NetworkConfig tmpl{gen_named(Topology::Path, 1), {0.5}, T, 1.0};
        auto opt = base_opt({1.0});
        opt.utility.kind = UtilityKind::Linear;
        for (double p : {0.2, 0.5, 0.8}) {
            auto g = gradient({p}, tmpl, opt);
            const double want = T / std::pow(1.0 + (T - 1) * p, 2.0);
            CHECK(g[0] == doctest::Approx(want).epsilon(1e-5));
            CHECK(g[0] > 0.0);
        }
    }
}

TEST_CASE("analytic and finite-difference gradients agree on the path") {
    auto tmpl = path3_tmpl();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    for (auto kind : {UtilityKind::Log, UtilityKind::Linear}) {
        auto fd = base_opt({0.6, 0.6, 0.3});
        fd.utility.kind = kind;
        auto an = fd;
        an.grad_mode = GradMode::AnalyticPath3;
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> p{unif(rng), unif(rng), unif(rng)};
            auto gf = gradient(p, tmpl, fd);
            auto ga = gradient(p, tmpl, an);
            for (int i = 0; i < 3; ++i)
                CHECK(std::fabs(gf[static_cast<std::size_t>(i)] -
                                ga[static_cast<std::size_t>(i)]) <= 1e-6);
        }
    }
}

TEST_CASE("analytic mode refuses other graphs") {
    NetworkConfig tmpl{gen_named(Topology::Complete, 3), {0.5, 0.5, 0.5}, 2, 1.0};
    auto opt = base_opt({1.0, 1.0, 1.0});
    opt.grad_mode = GradMode::AnalyticPath3;
    CHECK_THROWS_AS(gradient({0.5, 0.5, 0.5}, tmpl, opt), std::invalid_argument);
}

TEST_CASE("zero step size converges immediately with an unchanged iterate") {
    auto tmpl = path3_tmpl();
    auto opt = base_opt({0.6, 0.6, 0.3});
    opt.eta0 = 0.0;
    auto tr = optimize(tmpl, opt, {0.5, 0.5, 0.5});
    CHECK(tr.converged);
    CHECK(tr.iterations.size() == 1);
    CHECK(tr.final.p == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("a corner with an outward ascent direction is a fixed point") {
    NetworkConfig tmpl{gen_named(Topology::Path, 1), {0.5}, 2, 1.0};
    auto opt = base_opt({1.0});
    opt.utility.kind = UtilityKind::Linear;
    auto tr = optimize(tmpl, opt, {opt.p_hi});
    CHECK(tr.converged);
    CHECK(tr.final.p[0] == opt.p_hi);
    CHECK(tr.iterations.size() == 1);
}

TEST_CASE("monotone single-node objective drives p to the upper bound") {
    NetworkConfig tmpl{gen_named(Topology::Path, 1), {0.5}, 2, 1.0};
    auto opt = base_opt({1.0});
    opt.utility.kind = UtilityKind::Linear;
    opt.max_iters = 2000;
    auto tr = optimize(tmpl, opt, {0.3});
    CHECK(tr.converged);
    CHECK(tr.final.p[0] == doctest::Approx(opt.p_hi).epsilon(1e-9));
}

TEST_CASE("backtracking ascent is monotone and ends near a stationary point") {
    auto tmpl = path3_tmpl();
    auto opt = base_opt({0.6, 0.6, 0.3});
    opt.tol = 1e-6;
    opt.max_iters = 5000;
    auto tr = optimize(tmpl, opt, {0.5, 0.5, 0.5});
    CHECK(tr.converged);
    REQUIRE(tr.iterations.size() >= 2);
    for (std::size_t k = 1; k < tr.iterations.size(); ++k)
        CHECK(tr.iterations[k].J >= tr.iterations[k - 1].J);
    for (const auto& it : tr.iterations)
        for (double v : it.p) {
            CHECK(v >= opt.p_lo);
            CHECK(v <= opt.p_hi);
        }
    bool interior = true;
    for (double v : tr.final.p)
        interior = interior && v > opt.p_lo + 1e-3 && v < opt.p_hi - 1e-3;
    if (interior) {
        auto g = gradient(tr.final.p, tmpl, opt);
        double norm = 0.0;
        for (double v : g) norm = std::max(norm, std::fabs(v));
        CHECK(norm <= 10.0 * opt.tol);
    }
}

TEST_CASE("fixed-step mode reproduces plain projected ascent") {
    auto tmpl = path3_tmpl();
    auto opt = base_opt({0.6, 0.6, 0.3});
    opt.step_rule = StepRule::Fixed;
    opt.max_iters = 50;
    auto tr = optimize(tmpl, opt, {0.5, 0.5, 0.5});
    CHECK(tr.iterations.size() >= 2);
    CHECK(tr.final.J > tr.iterations.front().J);
}

TEST_CASE("region sweep traces a monotone trade-off with node 0 pinned") {
    auto tmpl = path3_tmpl();
    tmpl.p = {0.0, 0.5, 0.5};
    OptimizerConfig opt;
    opt.utility.kind = UtilityKind::Linear;
    opt.frozen = {0};
    opt.tol = 1e-8;
    opt.max_iters = 3000;

    std::vector<std::vector<double>> grid;
    for (int k = 0; k <= 10; ++k) {
        const double t = k / 10.0;
        grid.push_back({0.0, t, 1.0 - t});
    }
    auto pts = region_boundary(tmpl, grid, opt, {0.0, 0.5, 0.5});
    REQUIRE(pts.size() == grid.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        REQUIRE(pts[k].ok);
        CHECK(pts[k].p_star[0] == 0.0);
        CHECK(pts[k].S_star[0] == 0.0);
        if (k > 0) {
            CHECK(pts[k].S_star[1] >= pts[k - 1].S_star[1] - 1e-6);
            CHECK(pts[k].S_star[2] <= pts[k - 1].S_star[2] + 1e-6);
        }
    }
    // extreme weight: the last point maximizes S_1 over the sweep
    for (const auto& pt : pts) CHECK(pts.back().S_star[1] >= pt.S_star[1] - 1e-6);
}
