#include "ergeig/simulate.hpp"

#include "doctest.h"

#include <cmath>

using namespace ergeig;

namespace {

SimConfig quick_config() {
    SimConfig c;
    c.dim = 1;
    c.radius = std::cbrt(1.5);
    c.dt = 1e-3;
    c.horizon = 20.0;
    c.paths = 8;
    c.seed = 42;
    return c;
}

}  // namespace

TEST_CASE("simulation is reproducible for a fixed seed") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    SimConfig c = quick_config();
    ErgodicEstimate a = simulate_ball_policy(quad, c);
    ErgodicEstimate b = simulate_ball_policy(quad, c);
    CHECK(a.mean == b.mean);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.running_mean == b.running_mean);
    CHECK(a.local_time_mean == b.local_time_mean);

    c.seed = 43;
    ErgodicEstimate d = simulate_ball_policy(quad, c);
    CHECK(d.mean != a.mean);
}

TEST_CASE("estimate decomposes into running cost plus local time") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    SimConfig c = quick_config();
    ErgodicEstimate e = simulate_ball_policy(quad, c);
    CHECK(e.mean == doctest::Approx(e.running_mean + e.local_time_mean).epsilon(1e-12));
    CHECK(e.local_time_mean >= 0);
    CHECK(e.standard_error > 0);
}

TEST_CASE("a cost constant shifts the estimate by the constant") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    auto shifted = make_cost(CostFamily::Quadratic, {}, 1, 2.0);
    SimConfig c = quick_config();
    ErgodicEstimate a = simulate_ball_policy(quad, c);
    ErgodicEstimate b = simulate_ball_policy(shifted, c);
    // identical noise stream, so the shift passes straight through
    CHECK(b.mean - a.mean == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(b.local_time_mean == doctest::Approx(a.local_time_mean).epsilon(1e-12));
}

TEST_CASE("running cost matches the uniform occupation average") {
    // reflected Brownian motion on [-r, r] equidistributes, so the f part
    // of the estimate approaches (1/2r) * int f = r^2/3 for f = x^2
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    SimConfig c = quick_config();
    c.horizon = 50.0;
    ErgodicEstimate e = simulate_ball_policy(quad, c);
    double target = c.radius * c.radius / 3.0;
    CHECK(std::abs(e.running_mean - target) <= 3 * e.standard_error + 0.05);
}

TEST_CASE("local time decreases with the reflection radius") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    SimConfig c = quick_config();
    auto sweep = policy_sweep(quad, {0.8, 1.4, 2.2}, c);
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].second.local_time_mean > sweep[1].second.local_time_mean);
    CHECK(sweep[1].second.local_time_mean > sweep[2].second.local_time_mean);
    for (const auto& [r, est] : sweep) CHECK(est.mean > 0);
}

TEST_CASE("every admissible radius costs at least the eigenvalue") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    SimConfig c = quick_config();
    c.horizon = 50.0;
    const double lambda = std::pow(1.5, 2.0 / 3.0);
    for (double r : {0.9, std::cbrt(1.5), 1.5}) {
        c.radius = r;
        ErgodicEstimate e = simulate_ball_policy(quad, c);
        CHECK(e.mean >= lambda - 3 * e.standard_error - 0.05);
    }
}

TEST_CASE("two dimensional paths stay inside the reflection ball") {
    // indirect check: with a tiny radius the running cost must be tiny and
    // the local time dominates
    auto quad = make_cost(CostFamily::Quadratic, {}, 2);
    SimConfig c = quick_config();
    c.dim = 2;
    c.radius = 0.2;
    ErgodicEstimate e = simulate_ball_policy(quad, c);
    CHECK(e.running_mean <= 0.2 * 0.2 + 0.05);
    CHECK(e.local_time_mean > e.running_mean);
}

TEST_CASE("sim config validation") {
    SimConfig c = quick_config();
    CHECK_NOTHROW(c.validate());
    c.dt = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.paths = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.radius = -1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.burn_in = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.dim = 3;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("policy sweep with no radii is empty") {
    auto quad = make_cost(CostFamily::Quadratic, {}, 1);
    CHECK(policy_sweep(quad, {}, quick_config()).empty());
}
