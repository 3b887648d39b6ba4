#include "ergeig/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergeig {

double lower_bound(const ScalarField& phi, const CostFunction& f,
                   double gradient_slack) {
    if (gradient_slack <= 0) throw ValidationError("gradient_slack must be positive");
    const Grid& g = phi.grid;
    ScalarField gn = gradient_central_norm(phi);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx)
        if (gn[idx] > 1.0 + gradient_slack)
            throw ValidationError("lower_bound: |D phi| exceeds 1 + slack");

    ScalarField lap = laplacian_5pt(phi);
    ScalarField fvals = sample_cost(f, g);
    double interior_min = std::numeric_limits<double>::infinity();
    double boundary_min = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        double val = lap[idx] + fvals[idx];
        if (g.on_boundary(idx)) boundary_min = std::min(boundary_min, val);
        else interior_min = std::min(interior_min, val);
    }
    if (boundary_min < interior_min)
        throw SolverError("lower_bound: minimum attained on the boundary ring");
    return interior_min;
}

double upper_bound(const ScalarField& psi, const CostFunction& f,
                   double edge_slack, double far_slack) {
    if (edge_slack <= 0 || edge_slack >= 1)
        throw ValidationError("edge_slack must lie in (0, 1)");
    const Grid& g = psi.grid;
    const int m = g.nodes_per_axis;
    const double h = g.spacing();

    // far-field proxy: outward one-sided slope on the boundary ring
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        if (!g.on_boundary(idx)) continue;
        int i, j;
        g.split(idx, i, j);
        int di = (i == 0) ? 1 : (i == m - 1 ? -1 : 0);
        int dj = (g.dim == 2) ? ((j == 0) ? 1 : (j == m - 1 ? -1 : 0)) : 0;
        double dist = h * std::sqrt(double(di * di + dj * dj));
        double slope = (psi[idx] - psi[g.index(i + di, j + dj)]) / dist;
        if (slope < 1.0 - far_slack)
            throw ValidationError("upper_bound: far-field slope below 1 - slack");
    }

    ScalarField gn = gradient_central_norm(psi);
    ScalarField lap = laplacian_5pt(psi);
    ScalarField fvals = sample_cost(f, g);
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        if (g.on_boundary(idx)) continue;
        if (gn[idx] >= 1.0 - edge_slack) continue;
        best = std::max(best, lap[idx] + fvals[idx]);
        any = true;
    }
    if (!any) return std::numeric_limits<double>::infinity();
    return best;
}

Certificate certify(const EigenSolution& eigen, const CostFunction& f,
                    double mollify_radius, const SolverTolerances& tol,
                    double edge_slack) {
    tol.validate();
    ScalarField phi = mollify(eigen.u_star, mollify_radius);
    // any scale t <= 1 keeps t*phi a valid witness; shrink further when the
    // box closure pushed the mollified gradient past the slack
    double grad_sup = 0;
    for (double v : gradient_central_norm(phi).values) grad_sup = std::max(grad_sup, v);
    double scale = 1.0 / (1.0 + tol.gradient_slack);
    double cap = 0.999 * (1.0 + tol.gradient_slack) / std::max(grad_sup, 1e-12);
    scale = std::min(scale, cap);
    for (double& v : phi.values) v *= scale;

    Certificate cert;
    cert.lambda_minus = lower_bound(phi, f, tol.gradient_slack);
    cert.lambda_plus = upper_bound(eigen.u_star, f, edge_slack, tol.gradient_slack);
    cert.gap = cert.lambda_plus - cert.lambda_minus;
    cert.phi_witness = "mollify(u_star, " + std::to_string(mollify_radius) +
                       ") scaled by " + std::to_string(scale);
    cert.psi_witness = "u_star (unmollified grid field)";
    return cert;
}

}  // namespace ergeig
