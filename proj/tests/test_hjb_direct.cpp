#include "ergeig/hjb_direct.hpp"

#include "doctest.h"

#include <cmath>

using namespace ergeig;

TEST_CASE("upwind eikonal residual of a cone") {
    Grid g = Grid::make(1, 4.0, 81);
    ScalarField u(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) u[k] = std::abs(g.point(k)[0]);
    ScalarField res = eikonal_residual(u);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (std::abs(g.point(k)[0]) < 1e-12)
            CHECK(res[k] == doctest::Approx(-1.0));  // both quotients point uphill
        else
            CHECK(res[k] == doctest::Approx(0.0));
    }
}

TEST_CASE("constrained solve: residuals, convexity and bounds, 1-d") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    DiscountSolution sol = solve_constrained(quad, 1.0, g, tol);

    CHECK(sol.elliptic_residual_sup <= 1e-7);
    CHECK(sol.eikonal_residual_sup <= 1e-7);
    CHECK(sol.complementarity_violation <= 1e-7);

    const double K = sol.K_bound;
    CHECK(K == doctest::Approx(2.0));
    ScalarField sd = second_difference(sol.u, {1, 0});
    for (double v : sd.values) CHECK(v >= -tol.convexity_slack);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        CHECK(sol.u[k] >= std::max(g.radius(k) - K, 0.0) - 1e-9);  // u >= (|x| - K)^+
    CHECK(sol.lambda >= -1e-12);
    CHECK(sol.lambda <= K + sol.C_estimate + 1e-9);

    // grid gradient bound with the discrete slack
    ScalarField gn = gradient_central_norm(sol.u);
    for (double v : gn.values) CHECK(v <= 1.0 + 3 * g.spacing());
}

TEST_CASE("constrained solve is symmetric under reflection") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    DiscountSolution sol = solve_constrained(quad, 0.5, g, tol);
    int last = g.nodes_per_axis - 1;
    for (int i = 0; i <= last; ++i)
        CHECK(sol.u[g.index(i)] == doctest::Approx(sol.u[g.index(last - i)]).epsilon(1e-10));
}

TEST_CASE("constant shift of the cost moves u by c/delta") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    const double delta = 0.5, c = 3.0;
    DiscountSolution a = solve_constrained(quad, delta, g, tol);
    DiscountSolution b = solve_constrained(make_cost(CostFamily::Quadratic, {}, 1, c),
                                           delta, g, tol);
    double sup = 0;
    for (std::size_t k = 0; k < g.node_count(); ++k)
        sup = std::max(sup, std::abs(b.u[k] - a.u[k] - c / delta));
    CHECK(sup <= 1e-7);
    CHECK(b.lambda == doctest::Approx(a.lambda + c).epsilon(1e-7));
}

TEST_CASE("warm start with the exact solution converges immediately") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    DiscountSolution first = solve_constrained(quad, 1.0, g, tol);
    DiscountSolution again = solve_constrained(quad, 1.0, g, tol, &first.u);
    CHECK(again.iterations <= 1);
    CHECK(sup_diff(again.u, first.u) <= 1e-10);
}

TEST_CASE("active set is an outer region and the interface tracks the ODE radius") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 2);
    Grid g = Grid::make(2, 4.0, 81);
    SolverTolerances tol;
    DiscountSolution sol = solve_constrained(quad, 0.25, g, tol);

    // every inactive node sits inside radius C_estimate by definition;
    // check the active region contains the whole boundary ring
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.on_boundary(k)) CHECK(sol.active[k] == 1);
    CHECK(sol.C_estimate > 0.5);
    CHECK(sol.C_estimate < 3.5);

    CHECK(lipschitz_extension_residual(sol) <= 2 * g.spacing());
}

TEST_CASE("lipschitz extension residual is zero for an empty active set") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 11);
    SolverTolerances tol;
    DiscountSolution sol = solve_constrained(quad, 1.0, g, tol);
    sol.active.assign(g.node_count(), 0);
    CHECK(lipschitz_extension_residual(sol) == 0.0);
}

TEST_CASE("solver validates inputs") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 51);
    SolverTolerances tol;
    CHECK_THROWS_AS(solve_constrained(quad, 0.0, g, tol), ValidationError);
    CHECK_THROWS_AS(solve_constrained(quad, -1.0, g, tol), ValidationError);
    SolverTolerances bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(solve_constrained(quad, 1.0, g, bad), ValidationError);
}
