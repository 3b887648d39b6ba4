#include "ergeig/discount.hpp"

#include "ergeig/hjb_direct.hpp"
#include "ergeig/radial.hpp"

#include "doctest.h"

#include <cmath>

using namespace ergeig;

TEST_CASE("vanishing discount recovers the 1-d eigenvalue, both backends") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    const double exact = std::pow(1.5, 2.0 / 3.0);

    for (Backend b : {Backend::Direct, Backend::Penalty}) {
        EigenSolution sol = run_vanishing_discount(quad, g, b, tol);
        CHECK(sol.lambda_star == doctest::Approx(exact).epsilon(5e-3));
        CHECK(std::abs(sol.lambda_richardson - exact) <= 5e-3);
        CHECK(sol.lambda_sequence_cauchy);
        REQUIRE(sol.history.size() >= 2);
        // delta*u_min increases toward lambda* for this family
        for (std::size_t k = 1; k < sol.history.size(); ++k) {
            CHECK(sol.history[k].delta == doctest::Approx(0.5 * sol.history[k - 1].delta));
            CHECK(sol.history[k].lambda >= sol.history[k - 1].lambda - 1e-9);
        }
        // normalized field: min zero at the recorded argmin
        double mn = sol.u_star[0];
        for (double v : sol.u_star.values) mn = std::min(mn, v);
        CHECK(mn == doctest::Approx(0.0));
        CHECK(sol.u_star[sol.argmin] == doctest::Approx(0.0));
    }
}

TEST_CASE("backends agree on a matched grid") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution d = run_vanishing_discount(quad, g, Backend::Direct, tol);
    EigenSolution p = run_vanishing_discount(quad, g, Backend::Penalty, tol);
    CHECK(std::abs(d.lambda_star - p.lambda_star) <= 2e-3);
}

TEST_CASE("lambda_k stays inside [0, K + C]") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    const double K = subsolution_constant(quad, 1);
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);
    DiscountSolution last = solve_constrained(quad, sol.delta_final, g, tol);
    for (const auto& rec : sol.history) {
        CHECK(rec.lambda >= -1e-9);
        CHECK(rec.lambda <= K + last.C_estimate + 1e-6);
    }
}

TEST_CASE("eigenvalue shifts with a cost constant") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    auto shifted = make_cost(CostFamily::Quadratic, {}, 1, 0.9);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution a = run_vanishing_discount(quad, g, Backend::Direct, tol);
    EigenSolution b = run_vanishing_discount(shifted, g, Backend::Direct, tol);
    CHECK(b.lambda_star - a.lambda_star == doctest::Approx(0.9).epsilon(2e-3));
}

TEST_CASE("free region is a nonempty interior neighborhood of the argmin") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 2);
    Grid g = Grid::make(2, 4.0, 81);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);

    bool any = false;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!sol.omega0[k]) continue;
        any = true;
        CHECK(!g.on_boundary(k));
    }
    CHECK(any);
    CHECK(sol.omega0[sol.argmin] == 1);

    // reflection symmetry of the detected region
    int last = g.nodes_per_axis - 1;
    for (int j = 0; j <= last; ++j)
        for (int i = 0; i <= last; ++i)
            CHECK(sol.omega0[g.index(i, j)] == sol.omega0[g.index(last - i, j)]);

    double r_detected = mask_radius(g, sol.omega0);
    double r_exact = std::cbrt(2.0);
    CHECK(std::abs(r_detected - r_exact) <= 3 * g.spacing());
}

TEST_CASE("detected radius tracks the exact free boundary in 1-d") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 401);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);
    double r_exact = std::cbrt(1.5);
    CHECK(std::abs(mask_radius(g, sol.omega0) - r_exact) <= 2 * g.spacing());
}

TEST_CASE("base point insensitivity at small delta") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);
    DiscountSolution last = solve_constrained(quad, sol.delta_final, g, tol);

    std::size_t x0 = g.index(g.nodes_per_axis / 2);
    std::size_t y0 = g.index(g.nodes_per_axis / 4);
    CHECK(base_point_insensitivity(last.u, sol.delta_final, x0, x0) == 0.0);
    double dist = std::abs(g.point(x0)[0] - g.point(y0)[0]);
    CHECK(base_point_insensitivity(last.u, sol.delta_final, x0, y0) <=
          sol.delta_final * dist * (1 + tol.gradient_slack) + 1e-12);
}

TEST_CASE("loop reports exhaustion instead of a fake limit") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    SolverTolerances tol;
    DiscountLoopConfig cfg;
    cfg.max_levels = 2;
    cfg.lambda_tol = 1e-12;
    CHECK_THROWS_AS(run_vanishing_discount(quad, g, Backend::Direct, tol, cfg), SolverError);
    cfg.max_levels = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("free boundary detector on an exact profile") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    auto [lambda, r0] = radial_eigen(quad, 1);
    Grid g = Grid::make(1, 4.0, 401);
    const int mid = (g.nodes_per_axis - 1) / 2;
    std::vector<double> rs;
    for (int i = mid; i < g.nodes_per_axis; ++i) rs.push_back(g.axis_coord(i));
    RadialSolution prof = radial_profile(quad, 1, lambda, r0, rs);
    ScalarField u(g);
    for (int i = 0; i < g.nodes_per_axis; ++i)
        u[g.index(i)] = prof.phi[std::size_t(std::abs(i - mid))];

    auto mask = free_boundary(u, 1e-4);
    double rd = mask_radius(g, mask);
    CHECK(rd > 0);
    CHECK(std::abs(rd - r0) <= 2 * g.spacing() + std::sqrt(1e-4 / r0));
}
