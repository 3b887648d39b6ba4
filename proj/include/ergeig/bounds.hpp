#pragma once

#include "ergeig/core.hpp"
#include "ergeig/discount.hpp"

#include <string>

namespace ergeig {

/// Two-sided certificate lambda_minus <= lambda* <= lambda_plus from
/// discrete test fields.
struct Certificate {
    double lambda_minus = 0;
    double lambda_plus = 0;
    double gap = 0;
    std::string phi_witness;  // how the lower-bound field was built
    std::string psi_witness;  // how the upper-bound field was built
};

/// min over interior nodes of Lap_h phi + f, valid whenever centered
/// |D_h phi| <= 1 + gradient_slack everywhere. Throws ValidationError on a
/// slack violation and SolverError when the minimum is attained on the
/// boundary ring (truncation makes the bound inconclusive there).
double lower_bound(const ScalarField& phi, const CostFunction& f,
                   double gradient_slack);

/// max of Lap_h psi + f over interior nodes with centered |D_h psi| <
/// 1 - edge_slack; +infinity when that set is empty. Requires the
/// outward one-sided slope on the boundary ring to be >= 1 - far_slack
/// (discrete proxy for liminf psi(x)/|x| >= 1).
double upper_bound(const ScalarField& psi, const CostFunction& f,
                   double edge_slack, double far_slack);

/// Builds phi = mollify(u*, rho) rescaled by 1/(1 + gradient_slack) and
/// psi = u*, and evaluates both bounds.
Certificate certify(const EigenSolution& eigen, const CostFunction& f,
                    double mollify_radius, const SolverTolerances& tol,
                    double edge_slack = 1e-4);

}  // namespace ergeig
