#include "ergeig/hjb_direct.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergeig {

namespace {

double upwind_norm(const ScalarField& u, int i, int j) {
    const Grid& g = u.grid;
    const double h = g.spacing();
    const int m = g.nodes_per_axis;
    double s = 0;
    {
        double d = 0;
        double c = u[g.index(i, j)];
        if (i > 0) d = std::max(d, (c - u[g.index(i - 1, j)]) / h);
        if (i < m - 1) d = std::max(d, (c - u[g.index(i + 1, j)]) / h);
        s += d * d;
    }
    if (g.dim == 2) {
        double d = 0;
        double c = u[g.index(i, j)];
        if (j > 0) d = std::max(d, (c - u[g.index(i, j - 1)]) / h);
        if (j < m - 1) d = std::max(d, (c - u[g.index(i, j + 1)]) / h);
        s += d * d;
    }
    return std::sqrt(s);
}

double interior_elliptic_residual(const ScalarField& u, const ScalarField& fvals,
                                  double delta, int i, int j) {
    const Grid& g = u.grid;
    const double h2 = g.spacing() * g.spacing();
    std::size_t idx = g.index(i, j);
    double lap = (u[g.index(i - 1, j)] - 2 * u[idx] + u[g.index(i + 1, j)]) / h2;
    if (g.dim == 2)
        lap += (u[g.index(i, j - 1)] - 2 * u[idx] + u[g.index(i, j + 1)]) / h2;
    return delta * u[idx] - lap - fvals[idx];
}

}  // namespace

ScalarField eikonal_residual(const ScalarField& field) {
    ScalarField out(field.grid);
    for (std::size_t idx = 0; idx < field.grid.node_count(); ++idx) {
        int i, j;
        field.grid.split(idx, i, j);
        out[idx] = upwind_norm(field, i, j) - 1.0;
    }
    return out;
}

DiscountSolution solve_constrained(const CostFunction& f, double delta, const Grid& grid,
                                   const SolverTolerances& tol,
                                   const ScalarField* warm_start) {
    if (delta <= 0) throw ValidationError("delta must be positive");
    tol.validate();
    const double h = grid.spacing();
    const double h2 = h * h;
    const int m = grid.nodes_per_axis;
    const std::size_t N = grid.node_count();
    ScalarField fvals = sample_cost(f, grid);
    const double K = subsolution_constant(f, grid.dim);

    ScalarField u(grid);
    if (warm_start && warm_start->values.size() == N) {
        u = *warm_start;
    } else {
        // Lemma-style supersolution: K/delta plus a slope-1 cap profile
        for (std::size_t idx = 0; idx < N; ++idx) {
            double r = grid.radius(idx);
            u[idx] = K / delta + (r <= 1 ? 0.5 * r * r : r - 0.5);
        }
    }

    double fsup = sup_norm(fvals);
    std::vector<std::uint8_t> active(N, 0), prev_active(N, 2);
    std::vector<std::uint8_t> best_active(N, 0);
    ScalarField best_u = u;
    double best_res = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;

    auto residual_target = [&]() {
        double floor = 200 * std::numeric_limits<double>::epsilon() * (1 + sup_norm(u)) / h2;
        return std::max(tol.newton_tol * (1 + fsup + sup_norm(u)), floor);
    };

    // Howard-style policy iteration: per node pick the branch attaining the
    // max, freeze the upwind direction of the eikonal branch, solve the
    // resulting global linear system, repeat.
    for (int outer = 0; outer < tol.max_iters; ++outer) {
        iterations = outer;
        double combined = 0;
        for (std::size_t idx = 0; idx < N; ++idx) {
            int i, j;
            grid.split(idx, i, j);
            if (grid.on_boundary(idx)) {
                active[idx] = 1;
                continue;
            }
            double r_ell = interior_elliptic_residual(u, fvals, delta, i, j);
            double r_eik = upwind_norm(u, i, j) - 1.0;
            active[idx] = (r_eik > r_ell) ? 1 : 0;  // tie -> elliptic branch
            combined = std::max(combined, std::abs(std::max(r_ell, r_eik)));
        }
        if (combined < best_res) {
            best_res = combined;
            best_u = u;
            best_active = active;
        }
        if (active == prev_active && combined <= residual_target()) {
            converged = true;
            break;
        }
        prev_active = active;

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(N * 5);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(Eigen::Index(N));
        for (std::size_t idx = 0; idx < N; ++idx) {
            int i, j;
            grid.split(idx, i, j);
            Eigen::Index rI(idx);
            if (grid.on_boundary(idx)) {
                int di = (i == 0) ? 1 : (i == m - 1 ? -1 : 0);
                int dj = (grid.dim == 2) ? ((j == 0) ? 1 : (j == m - 1 ? -1 : 0)) : 0;
                trips.emplace_back(rI, rI, 1.0);
                trips.emplace_back(rI, Eigen::Index(grid.index(i + di, j + dj)), -1.0);
                b[rI] = h * std::sqrt(double(di * di + dj * dj));
                continue;
            }
            bool eikonal_row = active[idx] != 0;
            if (eikonal_row) {
                // frozen upwind directions and weights: sum_a w_a (u - u_nb)/h = 1
                double d[2] = {0, 0};
                std::size_t nb[2] = {0, 0};
                double c = u[idx];
                {
                    double db = (c - u[grid.index(i - 1, j)]) / h;
                    double df = (c - u[grid.index(i + 1, j)]) / h;
                    if (db >= df && db > 0) { d[0] = db; nb[0] = grid.index(i - 1, j); }
                    else if (df > 0) { d[0] = df; nb[0] = grid.index(i + 1, j); }
                }
                if (grid.dim == 2) {
                    double db = (c - u[grid.index(i, j - 1)]) / h;
                    double df = (c - u[grid.index(i, j + 1)]) / h;
                    if (db >= df && db > 0) { d[1] = db; nb[1] = grid.index(i, j - 1); }
                    else if (df > 0) { d[1] = df; nb[1] = grid.index(i, j + 1); }
                }
                double q = std::sqrt(d[0] * d[0] + d[1] * d[1]);
                if (q <= 0) {
                    eikonal_row = false;  // local minimum: no upwind direction
                    active[idx] = 0;
                } else {
                    double diag = 0;
                    for (int a = 0; a < grid.dim; ++a) {
                        if (d[a] <= 0) continue;
                        double w = d[a] / q / h;
                        diag += w;
                        trips.emplace_back(rI, Eigen::Index(nb[a]), -w);
                    }
                    trips.emplace_back(rI, rI, diag);
                    b[rI] = 1.0;
                }
            }
            if (!eikonal_row) {
                trips.emplace_back(rI, rI, delta + 2.0 * grid.dim / h2);
                trips.emplace_back(rI, Eigen::Index(grid.index(i - 1, j)), -1.0 / h2);
                trips.emplace_back(rI, Eigen::Index(grid.index(i + 1, j)), -1.0 / h2);
                if (grid.dim == 2) {
                    trips.emplace_back(rI, Eigen::Index(grid.index(i, j - 1)), -1.0 / h2);
                    trips.emplace_back(rI, Eigen::Index(grid.index(i, j + 1)), -1.0 / h2);
                }
                b[rI] = fvals[idx];
            }
        }
        const Eigen::Index nN = Eigen::Index(N);
        Eigen::SparseMatrix<double> A(nN, nN);
        A.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
        if (lu.info() != Eigen::Success)
            throw SolverError("solve_constrained: singular policy system");
        Eigen::VectorXd x = lu.solve(b);
        for (std::size_t idx = 0; idx < N; ++idx) u[idx] = x[Eigen::Index(idx)];
    }

    if (!converged) {
        // mask-cycling guard: keep the iterate with the smallest residual
        u = best_u;
        active = best_active;
    }

    DiscountSolution sol;
    sol.u = u;
    sol.delta = delta;
    sol.active = active;
    sol.iterations = iterations;
    sol.K_bound = K;

    double ell_sup = 0, eik_sup = 0, viol = 0, c_est = 0, l_est = 0;
    for (std::size_t idx = 0; idx < N; ++idx) {
        int i, j;
        grid.split(idx, i, j);
        if (grid.on_boundary(idx)) continue;
        double r_ell = interior_elliptic_residual(u, fvals, delta, i, j);
        double r_eik = upwind_norm(u, i, j) - 1.0;
        if (active[idx]) eik_sup = std::max(eik_sup, std::abs(r_eik));
        else ell_sup = std::max(ell_sup, std::abs(r_ell));
        viol = std::max(viol, std::abs(std::max(r_ell, r_eik)));
        if (!active[idx]) c_est = std::max(c_est, grid.radius(idx));
    }
    sol.elliptic_residual_sup = ell_sup;
    sol.eikonal_residual_sup = eik_sup;
    sol.complementarity_violation = viol;
    sol.C_estimate = c_est;

    std::vector<std::array<int, 2>> offsets = {{1, 0}};
    if (grid.dim == 2) offsets.insert(offsets.end(), {{0, 1}, {1, 1}, {1, -1}});
    for (auto z : offsets) {
        double zlen2 = h2 * double(z[0] * z[0] + z[1] * z[1]);
        ScalarField sd = second_difference(u, z);
        for (double v : sd.values) l_est = std::max(l_est, v / zlen2);
    }
    sol.L_estimate = l_est;

    sol.argmin = 0;
    for (std::size_t idx = 1; idx < N; ++idx)
        if (u[idx] < u[sol.argmin]) sol.argmin = idx;
    sol.lambda = delta * u[sol.argmin];
    return sol;
}

double lipschitz_extension_residual(const DiscountSolution& sol) {
    const Grid& g = sol.u.grid;
    const int m = g.nodes_per_axis;
    std::vector<std::size_t> closure;
    std::vector<std::size_t> active_nodes;
    auto inactive = [&](int i, int j) {
        if (i < 0 || i >= m || j < 0 || (g.dim == 2 && j >= m)) return false;
        return sol.active[g.index(i, g.dim == 2 ? j : 0)] == 0;
    };
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        int i, j;
        g.split(idx, i, j);
        if (!sol.active[idx]) {
            closure.push_back(idx);
        } else {
            bool touches = inactive(i - 1, j) || inactive(i + 1, j) ||
                           (g.dim == 2 && (inactive(i, j - 1) || inactive(i, j + 1)));
            if (touches) closure.push_back(idx);
            active_nodes.push_back(idx);
        }
    }
    if (closure.empty() || active_nodes.empty()) return 0.0;

    double res = 0;
    for (std::size_t x : active_nodes) {
        auto px = g.point(x);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t y : closure) {
            auto py = g.point(y);
            double d = (g.dim == 1) ? std::abs(px[0] - py[0])
                                    : std::hypot(px[0] - py[0], px[1] - py[1]);
            best = std::min(best, sol.u[y] + d);
        }
        res = std::max(res, std::abs(sol.u[x] - best));
    }
    return res;
}

}  // namespace ergeig
