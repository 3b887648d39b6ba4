#include "ergeig/bounds.hpp"

#include "doctest.h"

#include <cmath>
#include <limits>

using namespace ergeig;

TEST_CASE("lower bound with a flat test field is the interior minimum of f") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    ScalarField phi(g, 0.0);
    CHECK(lower_bound(phi, quad, 1e-2) == doctest::Approx(0.0));
    // constants do not matter
    ScalarField phi2(g, 11.0);
    CHECK(lower_bound(phi2, quad, 1e-2) == doctest::Approx(lower_bound(phi, quad, 1e-2)));
}

TEST_CASE("lower bound rejects steep test fields") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    ScalarField phi(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) phi[k] = 2.0 * std::abs(g.point(k)[0]);
    CHECK_THROWS_AS(lower_bound(phi, quad, 1e-2), ValidationError);
}

TEST_CASE("bound routines validate their slacks") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    ScalarField phi(g, 0.0);
    CHECK_THROWS_AS(lower_bound(phi, quad, 0.0), ValidationError);
    CHECK_THROWS_AS(lower_bound(phi, quad, -1.0), ValidationError);
    ScalarField psi(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) psi[k] = std::abs(g.point(k)[0]);
    CHECK_THROWS_AS(upper_bound(psi, quad, 0.0, 1e-2), ValidationError);
    CHECK_THROWS_AS(upper_bound(psi, quad, 1.0, 1e-2), ValidationError);
}

TEST_CASE("upper bound: constants drop out and empty regions give infinity") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    ScalarField psi(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) psi[k] = std::abs(g.point(k)[0]);

    double ub = upper_bound(psi, quad, 1e-2, 1e-2);
    CHECK(std::isfinite(ub));
    ScalarField psi2 = psi;
    for (double& v : psi2.values) v += 7.0;
    CHECK(upper_bound(psi2, quad, 1e-2, 1e-2) == doctest::Approx(ub));

    // on a grid with no node at the origin the cone has |D psi| >= 1/2
    // everywhere, so a slack past 1/2 empties the flat-gradient region
    Grid g2 = Grid::make(1, 4.0, 100);
    ScalarField cone(g2);
    for (std::size_t k = 0; k < g2.node_count(); ++k)
        cone[k] = std::abs(g2.point(k)[0]);
    double inf = upper_bound(cone, quad, 0.6, 1e-2);
    CHECK(inf == std::numeric_limits<double>::infinity());
}

TEST_CASE("upper bound enforces the far-field growth proxy") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 101);
    ScalarField flat(g, 0.0);  // no growth at the box edge
    CHECK_THROWS_AS(upper_bound(flat, quad, 1e-2, 1e-2), ValidationError);
}

TEST_CASE("certificate sandwiches the 1-d eigenvalue") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);
    Certificate cert = certify(sol, quad, 4 * g.spacing(), tol);

    const double exact = std::pow(1.5, 2.0 / 3.0);
    CHECK(cert.lambda_minus <= exact + 1e-9);
    CHECK(cert.lambda_plus >= exact - 1e-9);
    CHECK(cert.gap == doctest::Approx(cert.lambda_plus - cert.lambda_minus));
    CHECK(cert.gap <= 5e-2);
    CHECK(!cert.phi_witness.empty());
    CHECK(!cert.psi_witness.empty());
}

TEST_CASE("bounds shift exactly with a cost constant for fixed witnesses") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    auto shifted = quad.shifted(2.5);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);

    ScalarField phi = mollify(sol.u_star, 4 * g.spacing());
    for (double& v : phi.values) v /= 1.0 + tol.gradient_slack;
    double lb0 = lower_bound(phi, quad, tol.gradient_slack);
    double lb1 = lower_bound(phi, shifted, tol.gradient_slack);
    CHECK(lb1 - lb0 == doctest::Approx(2.5).epsilon(1e-12));

    double ub0 = upper_bound(sol.u_star, quad, 1e-4, 1e-2);
    double ub1 = upper_bound(sol.u_star, shifted, 1e-4, 1e-2);
    CHECK(ub1 - ub0 == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("scaled-down test fields remain admissible") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    Grid g = Grid::make(1, 4.0, 201);
    SolverTolerances tol;
    EigenSolution sol = run_vanishing_discount(quad, g, Backend::Direct, tol);
    const double exact = std::pow(1.5, 2.0 / 3.0);

    ScalarField phi = mollify(sol.u_star, 4 * g.spacing());
    for (double t : {0.25, 0.5, 0.9}) {
        ScalarField tphi = phi;
        for (double& v : tphi.values) v *= t / (1.0 + tol.gradient_slack);
        double lb = lower_bound(tphi, quad, tol.gradient_slack);
        CHECK(lb <= exact + 1e-9);
    }
}
