#pragma once

#include "ergeig/core.hpp"

#include <functional>
#include <vector>

namespace ergeig {

/**
 * High-accuracy eigenvalue and profile for rotational costs via the
 * free-boundary ODE reduction. Serves as the ground-truth oracle for the
 * grid solvers; dimension-generic (any n >= 1).
 *
 * The ergodic radial profile phi solves
 *     (r^{n-1} phi')' = r^{n-1} (lambda - f0(r)),   0 < r < r0,
 * with phi'(0) = 0, smooth pasting phi''(r0-) = 0 and phi'(r0) = 1, and
 * the slope-1 extension phi' = 1 for r > r0. Pasting gives
 *     lambda = f0(r0) + (n-1)/r0,
 * and phi'(r0) = 1 closes the system for r0.
 */
struct RadialSolution {
    int dim = 1;
    double lambda = 0;
    double r0 = 0;
    std::vector<double> r;        // sample radii
    std::vector<double> phi;      // profile, phi(0) = 0 for the ergodic case
    std::vector<double> dphi;     // phi'
    std::vector<double> d2phi;    // phi''
    double pasting_defect = 0;    // |phi''(r0-)|
};

/// Solve the two-condition pasting system for (lambda, r0); relative
/// accuracy 1e-10. Throws SolverError if no bracket is found (invalid f0).
std::pair<double, double> radial_eigen(const CostFunction& f, int dim);

/// Sample the ergodic profile for a (lambda, r0) pair from radial_eigen.
RadialSolution radial_profile(const CostFunction& f, int dim, double lambda,
                              double r0, const std::vector<double>& r_grid);

/// Discounted radial profile by shooting on phi(0) with targets
/// phi'(r0) = 1, phi''(r0) = 0. lambda field holds delta*phi(0).
RadialSolution radial_discounted(const CostFunction& f, int dim, double delta,
                                 const std::vector<double>& r_grid);

/// Adaptive Simpson quadrature, shared with the tests as a plain utility.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol = 1e-12);

}  // namespace ergeig
