#pragma once

#include "ergeig/core.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ergeig {

struct SimConfig {
    int dim = 1;
    double radius = 1.0;     // reflection radius
    double dt = 1e-4;
    double horizon = 200.0;
    int paths = 32;
    std::uint64_t seed = 0;
    double burn_in = 0.1;    // fraction of the horizon discarded

    void validate() const;
};

/// Time-averaged cost of the ball-reflection policy, aggregated over
/// paths. running + local_time components sum to mean.
struct ErgodicEstimate {
    double mean = 0;
    double standard_error = 0;
    double running_mean = 0;     // integral-of-f component
    double local_time_mean = 0;  // reflection local-time component
};

/// Euler-Maruyama X += sqrt(2 dt) xi with Skorokhod-style reflection:
/// when |X| > r, project to the sphere and credit the overshoot to the
/// local-time accumulator. Per-path substreams depend only on
/// (seed, path index), so runs are reproducible and paths independent.
ErgodicEstimate simulate_ball_policy(const CostFunction& f, const SimConfig& config);

/// Independent simulations per radius, same seeding contract.
std::vector<std::pair<double, ErgodicEstimate>> policy_sweep(
    const CostFunction& f, const std::vector<double>& radii, const SimConfig& config);

}  // namespace ergeig
