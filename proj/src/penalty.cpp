#include "ergeig/penalty.hpp"

#include "ergeig/hjb_direct.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ergeig {

double beta_penalty(double z, double eps) {
    if (eps <= 0) throw ValidationError("eps must be positive");
    if (z <= 0) return 0.0;
    if (z <= 2 * eps) return z * z / (4 * eps * eps);
    return (z - eps) / eps;
}

double beta_penalty_derivative(double z, double eps) {
    if (eps <= 0) throw ValidationError("eps must be positive");
    if (z <= 0) return 0.0;
    if (z <= 2 * eps) return z / (2 * eps * eps);
    return 1.0 / eps;
}

PenaltyConfig PenaltyConfig::defaults() {
    PenaltyConfig c;
    for (double e = 1e-1; e > 0.9e-4; e *= 0.5) c.epsilon_schedule.push_back(e);
    return c;
}

void PenaltyConfig::validate() const {
    if (epsilon_schedule.empty())
        throw ValidationError("epsilon schedule is empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double e : epsilon_schedule) {
        if (e <= 0 || e >= prev)
            throw ValidationError("epsilon schedule must be positive and decreasing");
        prev = e;
    }
    if (damping <= 0 || damping > 1)
        throw ValidationError("damping must lie in (0, 1]");
    tolerances.validate();
}

namespace {

// One upwind axis difference and its active neighbor (-1 when both
// one-sided quotients are nonpositive and the zero branch is taken).
struct AxisUpwind {
    double d = 0;
    std::ptrdiff_t neighbor = -1;
};

AxisUpwind axis_upwind(const ScalarField& v, std::size_t idx, std::size_t lo,
                       std::size_t hi, double h) {
    AxisUpwind out;
    double c = v[idx];
    double db = (c - v[lo]) / h;
    if (db > out.d) { out.d = db; out.neighbor = std::ptrdiff_t(lo); }
    double df = (c - v[hi]) / h;
    if (df > out.d) { out.d = df; out.neighbor = std::ptrdiff_t(hi); }
    return out;
}

}  // namespace

ScalarField solve_penalized(const CostFunction& f, double delta, double eps,
                            const Grid& grid, const SolverTolerances& tol,
                            double damping, const ScalarField* warm_start,
                            int* newton_iters) {
    if (delta <= 0) throw ValidationError("delta must be positive");
    if (eps <= 0) throw ValidationError("eps must be positive");
    if (damping <= 0 || damping > 1) throw ValidationError("damping must lie in (0, 1]");
    tol.validate();

    const double h = grid.spacing();
    const double h2 = h * h;
    const int m = grid.nodes_per_axis;
    const std::size_t N = grid.node_count();
    ScalarField fvals = sample_cost(f, grid);
    const double fsup = sup_norm(fvals);
    const double K = subsolution_constant(f, grid.dim);

    ScalarField v(grid);
    if (warm_start && warm_start->values.size() == N) {
        v = *warm_start;
    } else {
        for (std::size_t idx = 0; idx < N; ++idx) {
            double r = grid.radius(idx);
            v[idx] = K / delta + (r <= 1 ? 0.5 * r * r : r - 0.5);
        }
    }

    auto assemble_residual = [&](const ScalarField& w, Eigen::VectorXd& F) {
        for (std::size_t idx = 0; idx < N; ++idx) {
            int i, j;
            grid.split(idx, i, j);
            if (grid.on_boundary(idx)) {
                int di = (i == 0) ? 1 : (i == m - 1 ? -1 : 0);
                int dj = (grid.dim == 2) ? ((j == 0) ? 1 : (j == m - 1 ? -1 : 0)) : 0;
                double dist = h * std::sqrt(double(di * di + dj * dj));
                F[Eigen::Index(idx)] = w[idx] - w[grid.index(i + di, j + dj)] - dist;
                continue;
            }
            double lap = (w[grid.index(i - 1, j)] - 2 * w[idx] + w[grid.index(i + 1, j)]) / h2;
            double q2 = axis_upwind(w, idx, grid.index(i - 1, j), grid.index(i + 1, j), h).d;
            q2 *= q2;
            if (grid.dim == 2) {
                lap += (w[grid.index(i, j - 1)] - 2 * w[idx] + w[grid.index(i, j + 1)]) / h2;
                double d = axis_upwind(w, idx, grid.index(i, j - 1), grid.index(i, j + 1), h).d;
                q2 += d * d;
            }
            F[Eigen::Index(idx)] =
                delta * w[idx] - lap + beta_penalty(q2 - 1.0, eps) - fvals[idx];
        }
    };

    Eigen::VectorXd F = Eigen::VectorXd::Zero(Eigen::Index(N));
    assemble_residual(v, F);
    double res = F.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(res)) throw SolverError("solve_penalized: non-finite residual");

    auto target = [&]() {
        return std::max(tol.newton_tol * (1 + fsup + sup_norm(v)),
                        200 * std::numeric_limits<double>::epsilon() *
                            (1 + sup_norm(v)) / h2);
    };

    // The sparsity pattern (5-point stencil + boundary rows) never changes:
    // analyze once, refactorize values each iteration.
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;

    ScalarField best = v;
    double best_res = res;
    for (int it = 0; it < tol.max_iters; ++it) {
        if (res <= target()) {
            if (newton_iters) *newton_iters = it;
            return v;
        }

        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(N * 6);
        for (std::size_t idx = 0; idx < N; ++idx) {
            int i, j;
            grid.split(idx, i, j);
            Eigen::Index rI(idx);
            if (grid.on_boundary(idx)) {
                int di = (i == 0) ? 1 : (i == m - 1 ? -1 : 0);
                int dj = (grid.dim == 2) ? ((j == 0) ? 1 : (j == m - 1 ? -1 : 0)) : 0;
                trips.emplace_back(rI, rI, 1.0);
                trips.emplace_back(rI, Eigen::Index(grid.index(i + di, j + dj)), -1.0);
                continue;
            }
            double diag = delta + 2.0 * grid.dim / h2;
            trips.emplace_back(rI, Eigen::Index(grid.index(i - 1, j)), -1.0 / h2);
            trips.emplace_back(rI, Eigen::Index(grid.index(i + 1, j)), -1.0 / h2);
            if (grid.dim == 2) {
                trips.emplace_back(rI, Eigen::Index(grid.index(i, j - 1)), -1.0 / h2);
                trips.emplace_back(rI, Eigen::Index(grid.index(i, j + 1)), -1.0 / h2);
            }
            AxisUpwind ax[2];
            ax[0] = axis_upwind(v, idx, grid.index(i - 1, j), grid.index(i + 1, j), h);
            double q2 = ax[0].d * ax[0].d;
            if (grid.dim == 2) {
                ax[1] = axis_upwind(v, idx, grid.index(i, j - 1), grid.index(i, j + 1), h);
                q2 += ax[1].d * ax[1].d;
            }
            double bp = beta_penalty_derivative(q2 - 1.0, eps);
            if (bp > 0) {
                for (int a = 0; a < grid.dim; ++a) {
                    if (ax[a].neighbor < 0) continue;
                    double coef = bp * 2.0 * ax[a].d / h;
                    diag += coef;
                    trips.emplace_back(rI, Eigen::Index(ax[a].neighbor), -coef);
                }
            }
            trips.emplace_back(rI, rI, diag);
        }
        const Eigen::Index nN = Eigen::Index(N);
        Eigen::SparseMatrix<double> J(nN, nN);
        J.setFromTriplets(trips.begin(), trips.end());
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success)
            throw SolverError("solve_penalized: singular Newton system");
        Eigen::VectorXd dv = lu.solve(-F);

        // convex operator with an M-matrix Jacobian: full (or uniformly
        // damped) steps converge monotonically after the first overshoot
        for (std::size_t idx = 0; idx < N; ++idx)
            v[idx] += damping * dv[Eigen::Index(idx)];
        assemble_residual(v, F);
        res = F.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(res))
            throw SolverError("solve_penalized: non-finite residual at eps = " +
                              std::to_string(eps));
        if (res < best_res) {
            best_res = res;
            best = v;
        }
    }
    if (best_res > target()) {
        throw SolverError("solve_penalized: no convergence after max_iters at eps = " +
                          std::to_string(eps));
    }
    v = best;
    if (newton_iters) *newton_iters = tol.max_iters;
    return v;
}

std::pair<ScalarField, PenaltyDiagnostics> continuation(
    const CostFunction& f, double delta, const Grid& grid,
    const PenaltyConfig& config, const ScalarField* warm_start) {
    config.validate();
    const double h2 = grid.spacing() * grid.spacing();
    ScalarField v(grid);
    const ScalarField* start = warm_start;
    PenaltyDiagnostics diag;

    for (double eps : config.epsilon_schedule) {
        int iters = 0;
        v = solve_penalized(f, delta, eps, grid, config.tolerances, config.damping,
                            start, &iters);
        start = &v;

        PenaltyStageDiagnostics st;
        st.epsilon = eps;
        st.newton_iters = iters;
        ScalarField eik = eikonal_residual(v);
        double excess = 0;
        for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
            if (grid.on_boundary(idx)) continue;
            double q = eik[idx] + 1.0;
            double z = q * q - 1.0;
            st.max_beta = std::max(st.max_beta, beta_penalty(z, eps));
            excess = std::max(excess, z);
        }
        std::vector<std::array<int, 2>> offsets = {{1, 0}};
        if (grid.dim == 2) offsets.insert(offsets.end(), {{0, 1}, {1, 1}, {1, -1}});
        for (auto z : offsets) {
            double zlen2 = h2 * double(z[0] * z[0] + z[1] * z[1]);
            ScalarField sd = second_difference(v, z);
            for (double s : sd.values)
                st.max_second_difference = std::max(st.max_second_difference,
                                                    std::abs(s) / zlen2);
        }
        diag.stages.push_back(st);

        if (excess <= config.tolerances.gradient_slack)
            return {v, diag};
    }
    throw SolverError("continuation: epsilon schedule exhausted above gradient slack");
}

}  // namespace ergeig
