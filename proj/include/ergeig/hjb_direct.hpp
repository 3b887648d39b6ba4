#pragma once

#include "ergeig/core.hpp"

#include <cstdint>
#include <optional>

namespace ergeig {

/// Discounted solution of the discrete complementarity system
///   max{ delta*u - Lap_h u - f, |D_h u| - 1 } = 0
/// with the monotone upwind gradient on the constraint branch and a
/// slope-1 closure on the box boundary.
struct DiscountSolution {
    ScalarField u;
    double delta = 0;
    std::vector<std::uint8_t> active;   // eikonal branch active per node
    double lambda = 0;                  // delta * u at the nodal argmin
    std::size_t argmin = 0;
    double elliptic_residual_sup = 0;   // over inactive interior nodes
    double eikonal_residual_sup = 0;    // over active interior nodes
    double complementarity_violation = 0;
    int iterations = 0;
    // constants used by the invariant checks
    double K_bound = 0;      // n + max_{|x|<=1} f
    double C_estimate = 0;   // max |x| over inactive nodes
    double L_estimate = 0;   // max second difference / h^2
};

/// Upwind |D_h u| - 1 per node: per axis max(backward, -forward, 0)
/// difference quotient, root-sum-squared across axes. Boundary nodes use
/// whichever one-sided quotients exist.
ScalarField eikonal_residual(const ScalarField& field);

/// Policy iteration on the branch mask: linear solves on the elliptic
/// set, fast sweeping on the constrained set, mask recomputed from the
/// branch comparison until fixed. Ties go to the elliptic branch; if the
/// mask cycles past max_iters the iterate with the smallest combined
/// residual is accepted.
DiscountSolution solve_constrained(const CostFunction& f, double delta, const Grid& grid,
                                   const SolverTolerances& tol,
                                   const ScalarField* warm_start = nullptr);

/// sup over active nodes x of |u(x) - min_{y in closure of inactive set}
/// (u(y) + |x - y|)|; 0 when the active set is empty by convention.
double lipschitz_extension_residual(const DiscountSolution& sol);

}  // namespace ergeig
