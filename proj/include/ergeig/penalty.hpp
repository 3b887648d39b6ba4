#pragma once

#include "ergeig/core.hpp"

#include <utility>
#include <vector>

namespace ergeig {

/// C^1 convex penalty: 0 for z <= 0, z^2/(4 eps^2) on [0, 2 eps],
/// (z - eps)/eps beyond. beta(eps, eps) = 1/4 for every eps.
double beta_penalty(double z, double eps);
double beta_penalty_derivative(double z, double eps);

struct PenaltyConfig {
    std::vector<double> epsilon_schedule;  // strictly decreasing, positive
    double damping = 1.0;                  // initial Newton step factor in (0,1]
    SolverTolerances tolerances;

    /// 1e-1 halved down to (just below) 1e-4.
    static PenaltyConfig defaults();
    void validate() const;
};

/// Per-epsilon convergence record of the continuation.
struct PenaltyStageDiagnostics {
    double epsilon = 0;
    double max_beta = 0;              // max interior penalty value at convergence
    double max_second_difference = 0; // max interior second difference / h^2
    int newton_iters = 0;
};

struct PenaltyDiagnostics {
    std::vector<PenaltyStageDiagnostics> stages;
};

/// Damped semismooth Newton solve of the penalized discounted equation
///   delta*v - Lap_h v + beta_eps(|D_h v|^2 - 1) = f
/// with the monotone upwind gradient inside and the slope-1 closure on
/// the box boundary (same discretization as the constrained solver).
ScalarField solve_penalized(const CostFunction& f, double delta, double eps,
                            const Grid& grid, const SolverTolerances& tol,
                            double damping = 1.0,
                            const ScalarField* warm_start = nullptr,
                            int* newton_iters = nullptr);

/// Runs solve_penalized along the epsilon schedule with warm starts; stops
/// early once max interior (|D_h v|^2 - 1)^+ <= gradient_slack. Throws
/// SolverError if the schedule is exhausted without meeting the slack.
std::pair<ScalarField, PenaltyDiagnostics> continuation(
    const CostFunction& f, double delta, const Grid& grid,
    const PenaltyConfig& config, const ScalarField* warm_start = nullptr);

}  // namespace ergeig
