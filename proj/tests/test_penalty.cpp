#include "ergeig/penalty.hpp"

#include "ergeig/hjb_direct.hpp"

#include "doctest.h"

#include <cmath>

using namespace ergeig;

TEST_CASE("penalty function values") {
    CHECK(beta_penalty(-1.0, 0.1) == 0.0);
    CHECK(beta_penalty(0.0, 0.1) == 0.0);
    CHECK(beta_penalty(3.0, 1.0) == doctest::Approx(2.0));
    for (double eps : {1e-3, 1e-2, 0.5})
        CHECK(beta_penalty(eps, eps) == doctest::Approx(0.25));
    CHECK_THROWS_AS(beta_penalty(1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(beta_penalty_derivative(1.0, -1.0), ValidationError);
}

TEST_CASE("penalty function is C1, convex and nondecreasing") {
    const double eps = 0.37;
    double prev_v = beta_penalty(-1.0, eps);
    double prev_d = beta_penalty_derivative(-1.0, eps);
    for (double z = -1.0 + 1e-3; z <= 3.0; z += 1e-3) {
        double v = beta_penalty(z, eps);
        double d = beta_penalty_derivative(z, eps);
        CHECK(v >= prev_v - 1e-15);
        CHECK(d >= prev_d - 1e-15);  // convexity: beta' nondecreasing
        // derivative consistency at the patch joints and elsewhere
        double fd = (beta_penalty(z + 5e-7, eps) - beta_penalty(z - 5e-7, eps)) / 1e-6;
        CHECK(d == doctest::Approx(fd).epsilon(1e-4));
        prev_v = v;
        prev_d = d;
    }
}

TEST_CASE("penalized solve dominates the constrained solution") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    DiscountSolution u = solve_constrained(quad, 1.0, g, tol);
    ScalarField v = solve_penalized(quad, 1.0, 1e-2, g, tol);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        CHECK(v[k] >= u.u[k] - 1e-6);
    // convergence of the penalization: sup gap shrinks with eps
    ScalarField v2 = solve_penalized(quad, 1.0, 1e-3, g, tol, 1.0, &v);
    CHECK(sup_diff(v2, u.u) < sup_diff(v, u.u));
}

TEST_CASE("penalized solve is symmetric and shifts with the cost") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    const double delta = 0.5, c = 5.0;
    ScalarField v = solve_penalized(quad, delta, 1e-2, g, tol);
    int last = g.nodes_per_axis - 1;
    for (int i = 0; i <= last; ++i)
        CHECK(v[g.index(i)] == doctest::Approx(v[g.index(last - i)]).epsilon(1e-9));

    ScalarField vc = solve_penalized(make_cost(CostFamily::Quadratic, {}, 1, c),
                                     delta, 1e-2, g, tol);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        CHECK(vc[k] - v[k] == doctest::Approx(c / delta).epsilon(1e-6));
}

TEST_CASE("warm start with the converged iterate finishes immediately") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    int iters = 0;
    ScalarField v = solve_penalized(quad, 1.0, 1e-2, g, tol, 1.0, nullptr, &iters);
    CHECK(iters >= 1);
    int again = 0;
    solve_penalized(quad, 1.0, 1e-2, g, tol, 1.0, &v, &again);
    CHECK(again <= 1);
}

TEST_CASE("continuation meets the gradient slack and stabilizes the multiplier") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    PenaltyConfig cfg = PenaltyConfig::defaults();
    auto [v, diag] = continuation(quad, 1.0, g, cfg);

    REQUIRE(!diag.stages.empty());
    // gradient excess criterion used as the stopping rule (upwind norm)
    ScalarField eik = eikonal_residual(v);
    double excess = 0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (g.on_boundary(k)) continue;
        double q = eik[k] + 1.0;
        excess = std::max(excess, q * q - 1.0);
    }
    CHECK(excess <= cfg.tolerances.gradient_slack + 1e-12);

    // the penalty term approximates a multiplier: the recorded max stays
    // within a factor 2 across the last stages once the schedule is deep
    if (diag.stages.size() >= 3) {
        double a = diag.stages[diag.stages.size() - 2].max_beta;
        double b = diag.stages.back().max_beta;
        CHECK(b <= 2 * a + 1e-12);
        CHECK(a <= 2 * b + 1e-12);
    }
    for (const auto& st : diag.stages) CHECK(st.newton_iters >= 1);
}

TEST_CASE("continuation reports schedule exhaustion") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    PenaltyConfig cfg;
    cfg.epsilon_schedule = {1e-1};  // far too shallow
    cfg.tolerances.gradient_slack = 1e-9;
    CHECK_THROWS_AS(continuation(quad, 1.0, g, cfg), SolverError);
}

TEST_CASE("penalty config validation") {
    PenaltyConfig cfg = PenaltyConfig::defaults();
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.epsilon_schedule.front() == doctest::Approx(1e-1));
    for (std::size_t k = 1; k < cfg.epsilon_schedule.size(); ++k)
        CHECK(cfg.epsilon_schedule[k] < cfg.epsilon_schedule[k - 1]);
    CHECK(cfg.epsilon_schedule.back() < 1e-4);

    cfg.epsilon_schedule = {1e-2, 1e-1};  // not decreasing
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = PenaltyConfig::defaults();
    cfg.damping = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
