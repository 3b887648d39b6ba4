#include "ergeig/discount.hpp"

#include "ergeig/hjb_direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergeig {

void DiscountLoopConfig::validate() const {
    if (max_levels < 2) throw ValidationError("max_levels must be at least 2");
    if (lambda_tol <= 0) throw ValidationError("lambda_tol must be positive");
    if (edge_slack <= 0 || edge_slack >= 1)
        throw ValidationError("edge_slack must lie in (0, 1)");
}

double base_point_insensitivity(const ScalarField& u, double delta,
                                std::size_t x0, std::size_t y0) {
    if (x0 >= u.grid.node_count() || y0 >= u.grid.node_count())
        throw ValidationError("base point index out of range");
    return std::abs(delta * u[x0] - delta * u[y0]);
}

std::vector<std::uint8_t> free_boundary(const ScalarField& u_star, double edge_slack) {
    const Grid& g = u_star.grid;
    ScalarField gn = gradient_central_norm(u_star);
    std::vector<std::uint8_t> mask(g.node_count(), 0);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx)
        if (!g.on_boundary(idx) && gn[idx] < 1.0 - edge_slack) mask[idx] = 1;
    return mask;
}

double mask_radius(const Grid& grid, const std::vector<std::uint8_t>& mask) {
    double r = 0;
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx)
        if (idx < mask.size() && mask[idx]) r = std::max(r, grid.radius(idx));
    return r;
}

EigenSolution run_vanishing_discount(const CostFunction& f, const Grid& grid,
                                     Backend backend, const SolverTolerances& tol,
                                     const DiscountLoopConfig& config) {
    config.validate();
    tol.validate();
    PenaltyConfig pc = config.penalty;
    if (pc.epsilon_schedule.empty()) pc = PenaltyConfig::defaults();
    pc.tolerances = tol;

    EigenSolution sol;
    sol.backend = backend;

    ScalarField u(grid);
    bool have_prev = false;
    double lambda_prev = 0, delta_prev = 0, prev_increment = 0;
    ScalarField warm(grid);

    for (int k = 0; k < config.max_levels; ++k) {
        double delta = std::ldexp(1.0, -k);

        const ScalarField* start = nullptr;
        if (have_prev) {
            // shift the previous field by the predicted constant growth
            double c = lambda_prev * (1.0 / delta - 1.0 / delta_prev);
            warm = u;
            for (double& w : warm.values) w += c;
            start = &warm;
        }

        DeltaRecord rec;
        rec.delta = delta;
        if (backend == Backend::Direct) {
            DiscountSolution d = solve_constrained(f, delta, grid, tol, start);
            u = d.u;
            rec.iterations = d.iterations;
            rec.residual_sup = d.complementarity_violation;
            rec.lambda = d.lambda;
            sol.argmin = d.argmin;
        } else {
            auto [v, diag] = continuation(f, delta, grid, pc, start);
            u = v;
            rec.iterations = 0;
            for (const auto& st : diag.stages) rec.iterations += st.newton_iters;
            rec.residual_sup = diag.stages.back().max_beta * pc.epsilon_schedule.back();
            std::size_t amin = 0;
            for (std::size_t idx = 1; idx < u.values.size(); ++idx)
                if (u[idx] < u[amin]) amin = idx;
            rec.lambda = delta * u[amin];
            sol.argmin = amin;
        }
        rec.u_min = u[sol.argmin];
        rec.u_sup = 0;
        for (double w : u.values) rec.u_sup = std::max(rec.u_sup, w - rec.u_min);
        sol.history.push_back(rec);

        if (have_prev) {
            double inc = std::abs(rec.lambda - lambda_prev);
            if (sol.history.size() > 2 && inc > prev_increment * (1 + 1e-12))
                sol.lambda_sequence_cauchy = false;
            prev_increment = inc;
            if (inc <= config.lambda_tol * (1 + std::abs(rec.lambda))) {
                sol.lambda_star = rec.lambda;
                sol.lambda_richardson = 2 * rec.lambda - lambda_prev;
                sol.delta_final = delta;
                sol.u_star = u;
                for (double& w : sol.u_star.values) w -= rec.u_min;
                sol.omega0 = free_boundary(sol.u_star, config.edge_slack);
                bool empty = true;
                for (auto b : sol.omega0)
                    if (b) { empty = false; break; }
                if (empty)
                    throw SolverError("run_vanishing_discount: empty free region");
                return sol;
            }
        }
        lambda_prev = rec.lambda;
        delta_prev = delta;
        have_prev = true;
    }
    throw SolverError("run_vanishing_discount: schedule exhausted without convergence");
}

}  // namespace ergeig
