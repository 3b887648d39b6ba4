#include "ergeig/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergeig {

Grid Grid::make(int dim, double half_width, int nodes_per_axis) {
    if (dim != 1 && dim != 2)
        throw ValidationError("grid.dim must be 1 or 2");
    if (half_width <= 0.0)
        throw ValidationError("grid.half_width must be positive");
    if (nodes_per_axis < 5)
        throw ValidationError("grid.nodes must be at least 5");
    return Grid{dim, half_width, nodes_per_axis};
}

double Grid::radius(std::size_t idx) const {
    auto p = point(idx);
    return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

void SolverTolerances::validate() const {
    if (newton_tol <= 0 || max_iters <= 0 || gradient_slack <= 0 || convexity_slack <= 0)
        throw ValidationError("tolerances must be positive");
}

// ---- CostFunction ------------------------------------------------------

double CostFunction::bare_radial(double r) const {
    switch (family_) {
        case CostFamily::Quadratic:
            return r * r;
        case CostFamily::Power:
            return params_[0] * std::pow(r, params_[1]);
        case CostFamily::RadialTable: {
            // linear interpolation; extrapolate with the last segment slope
            const auto& rs = table_r_;
            const auto& vs = table_v_;
            if (r <= rs.front()) return vs.front();
            auto it = std::upper_bound(rs.begin(), rs.end(), r);
            std::size_t k = (it == rs.end()) ? rs.size() - 1 : std::size_t(it - rs.begin());
            double t = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
            return vs[k - 1] + t * (vs[k] - vs[k - 1]);
        }
        default:
            throw ValidationError("cost family is not radial");
    }
}

double CostFunction::radial_value(double r) const {
    return bare_radial(r) + offset_;
}

double CostFunction::bare_value(std::span<const double> x) const {
    switch (family_) {
        case CostFamily::Quadratic: {
            double s = 0;
            for (double xi : x) s += xi * xi;
            return s;
        }
        case CostFamily::Power: {
            double s = 0;
            for (double xi : x) s += xi * xi;
            return params_[0] * std::pow(std::sqrt(s), params_[1]);
        }
        case CostFamily::Anisotropic: {
            double a11 = params_[0], a12 = params_[1], a22 = params_[2];
            return a11 * x[0] * x[0] + 2 * a12 * x[0] * x[1] + a22 * x[1] * x[1];
        }
        case CostFamily::RadialTable: {
            double s = 0;
            for (double xi : x) s += xi * xi;
            return bare_radial(std::sqrt(s));
        }
    }
    return 0;
}

double CostFunction::value(std::span<const double> x) const {
    return bare_value(x) + offset_;
}

void CostFunction::gradient(std::span<const double> x, std::span<double> out) const {
    switch (family_) {
        case CostFamily::Quadratic:
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2 * x[i];
            return;
        case CostFamily::Power: {
            double s = 0;
            for (double xi : x) s += xi * xi;
            double r = std::sqrt(s);
            if (r == 0) {
                for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0;
                return;
            }
            double c = params_[0] * params_[1] * std::pow(r, params_[1] - 2);
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
            return;
        }
        case CostFamily::Anisotropic: {
            double a11 = params_[0], a12 = params_[1], a22 = params_[2];
            out[0] = 2 * (a11 * x[0] + a12 * x[1]);
            out[1] = 2 * (a12 * x[0] + a22 * x[1]);
            return;
        }
        case CostFamily::RadialTable: {
            // central difference on the table interpolant
            double s = 0;
            for (double xi : x) s += xi * xi;
            double r = std::sqrt(s);
            double dr = 1e-6 * (1 + r);
            double d = (bare_radial(r + dr) - bare_radial(std::max(0.0, r - dr))) /
                       (r + dr - std::max(0.0, r - dr));
            for (std::size_t i = 0; i < x.size(); ++i)
                out[i] = (r == 0) ? 0.0 : d * x[i] / r;
            return;
        }
    }
}

void CostFunction::hessian(std::span<const double> x, std::span<double> out) const {
    std::size_t n = x.size();
    switch (family_) {
        case CostFamily::Quadratic:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) out[i * n + j] = (i == j) ? 2.0 : 0.0;
            return;
        case CostFamily::Anisotropic:
            out[0] = 2 * params_[0]; out[1] = 2 * params_[1];
            out[2] = 2 * params_[1]; out[3] = 2 * params_[2];
            return;
        default: {
            // finite differences of the gradient; adequate for diagnostics
            std::vector<double> xp(x.begin(), x.end());
            std::vector<double> gp(n), gm(n);
            double dx = 1e-5;
            for (std::size_t j = 0; j < n; ++j) {
                xp[j] = x[j] + dx;
                gradient(xp, gp);
                xp[j] = x[j] - dx;
                gradient(xp, gm);
                xp[j] = x[j];
                for (std::size_t i = 0; i < n; ++i)
                    out[i * n + j] = (gp[i] - gm[i]) / (2 * dx);
            }
            return;
        }
    }
}

CostFunction CostFunction::shifted(double c) const {
    CostFunction g = *this;
    g.offset_ += c;
    return g;
}

CostFunction make_cost(CostFamily family, const std::vector<double>& params,
                       int dim, double offset) {
    if (dim < 1)
        throw ValidationError("cost dimension must be >= 1");
    CostFunction f;
    f.family_ = family;
    f.dim_ = dim;
    f.params_ = params;
    f.offset_ = offset;

    switch (family) {
        case CostFamily::Quadratic:
            break;
        case CostFamily::Power:
            if (params.size() != 2)
                throw ValidationError("power cost expects params {c, p}");
            if (params[0] <= 0)
                throw ValidationError("power cost scale must be positive");
            if (params[1] <= 1)
                throw ValidationError("not superlinear: power cost requires p > 1");
            break;
        case CostFamily::Anisotropic: {
            if (dim != 2)
                throw ValidationError("anisotropic cost requires n = 2");
            if (params.size() != 3)
                throw ValidationError("anisotropic cost expects params {a11, a12, a22}");
            double a11 = params[0], a12 = params[1], a22 = params[2];
            if (a11 <= 0 || a11 * a22 - a12 * a12 <= 0)
                throw ValidationError("anisotropic matrix must be symmetric positive definite");
            break;
        }
        case CostFamily::RadialTable: {
            if (params.size() < 6 || params.size() % 2 != 0)
                throw ValidationError("radial table expects at least 3 (r, v) pairs");
            for (std::size_t k = 0; k + 1 < params.size(); k += 2) {
                f.table_r_.push_back(params[k]);
                f.table_v_.push_back(params[k + 1]);
            }
            for (std::size_t k = 1; k < f.table_r_.size(); ++k) {
                if (f.table_r_[k] <= f.table_r_[k - 1])
                    throw ValidationError("radial table radii must be strictly increasing");
                if (f.table_v_[k] < f.table_v_[k - 1])
                    throw ValidationError("radial table must be nondecreasing");
            }
            for (std::size_t k = 2; k < f.table_r_.size(); ++k) {
                double s1 = (f.table_v_[k - 1] - f.table_v_[k - 2]) /
                            (f.table_r_[k - 1] - f.table_r_[k - 2]);
                double s2 = (f.table_v_[k] - f.table_v_[k - 1]) /
                            (f.table_r_[k] - f.table_r_[k - 1]);
                if (s2 < s1 - 1e-12)
                    throw ValidationError("radial table must be convex");
            }
            break;
        }
    }

    // Enforce f >= 0: sample the reference box and shift up if needed.
    const double box = 4.0;
    const int samples = 33;
    double fmin = std::numeric_limits<double>::infinity();
    int n = std::min(dim, 2);
    if (n == 1) {
        for (int i = 0; i < samples; ++i) {
            double x = -box + 2 * box * i / (samples - 1);
            fmin = std::min(fmin, f.value(std::span<const double>(&x, 1)));
        }
    } else {
        for (int i = 0; i < samples; ++i)
            for (int j = 0; j < samples; ++j) {
                std::array<double, 2> x = {-box + 2 * box * i / (samples - 1),
                                           -box + 2 * box * j / (samples - 1)};
                fmin = std::min(fmin, f.value(x));
            }
    }
    if (fmin < 0) {
        f.normalization_shift_ = -fmin;
        f.offset_ += -fmin;
    }
    return f;
}

// ---- discrete calculus -------------------------------------------------

std::vector<ScalarField> gradient_central(const ScalarField& field) {
    const Grid& g = field.grid;
    const double h = g.spacing();
    const int m = g.nodes_per_axis;
    std::vector<ScalarField> out(g.dim, ScalarField(g));
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        int i, j;
        g.split(idx, i, j);
        {
            double d;
            if (i == 0) d = (field[g.index(1, j)] - field[g.index(0, j)]) / h;
            else if (i == m - 1) d = (field[g.index(m - 1, j)] - field[g.index(m - 2, j)]) / h;
            else d = (field[g.index(i + 1, j)] - field[g.index(i - 1, j)]) / (2 * h);
            out[0][idx] = d;
        }
        if (g.dim == 2) {
            double d;
            if (j == 0) d = (field[g.index(i, 1)] - field[g.index(i, 0)]) / h;
            else if (j == m - 1) d = (field[g.index(i, m - 1)] - field[g.index(i, m - 2)]) / h;
            else d = (field[g.index(i, j + 1)] - field[g.index(i, j - 1)]) / (2 * h);
            out[1][idx] = d;
        }
    }
    return out;
}

ScalarField gradient_central_norm(const ScalarField& field) {
    auto grad = gradient_central(field);
    ScalarField out(field.grid);
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
        double s = 0;
        for (const auto& ga : grad) s += ga[idx] * ga[idx];
        out[idx] = std::sqrt(s);
    }
    return out;
}

ScalarField laplacian_5pt(const ScalarField& field) {
    const Grid& g = field.grid;
    const double h2 = g.spacing() * g.spacing();
    const int m = g.nodes_per_axis;
    ScalarField out(g);
    auto axis2 = [&](int i, int j, bool along_x) {
        auto at = [&](int k) {
            return along_x ? field[g.index(k, j)] : field[g.index(i, k)];
        };
        int c = along_x ? i : j;
        if (c == 0) return (at(0) - 2 * at(1) + at(2)) / h2;
        if (c == m - 1) return (at(m - 3) - 2 * at(m - 2) + at(m - 1)) / h2;
        return (at(c - 1) - 2 * at(c) + at(c + 1)) / h2;
    };
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        int i, j;
        g.split(idx, i, j);
        double v = axis2(i, j, true);
        if (g.dim == 2) v += axis2(i, j, false);
        out[idx] = v;
    }
    return out;
}

ScalarField second_difference(const ScalarField& field, std::array<int, 2> z) {
    const Grid& g = field.grid;
    const int m = g.nodes_per_axis;
    ScalarField out(g);
    if (z[0] == 0 && (g.dim == 1 || z[1] == 0))
        throw ValidationError("second_difference offset must be nonzero");
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        int i, j;
        g.split(idx, i, j);
        int ip = i + z[0], im = i - z[0];
        int jp = j + (g.dim == 2 ? z[1] : 0), jm = j - (g.dim == 2 ? z[1] : 0);
        if (ip < 0 || ip >= m || im < 0 || im >= m) continue;
        if (g.dim == 2 && (jp < 0 || jp >= m || jm < 0 || jm >= m)) continue;
        out[idx] = field[g.index(ip, jp)] - 2 * field[idx] + field[g.index(im, jm)];
    }
    return out;
}

ScalarField mollify(const ScalarField& field, double rho) {
    const Grid& g = field.grid;
    const double h = g.spacing();
    if (rho < h)
        throw ValidationError("mollification radius must be at least one spacing");
    if (rho > g.half_width)
        throw ValidationError("mollification radius exceeds domain half-width");
    const int m = g.nodes_per_axis;
    const int w = int(rho / h);  // kernel support in node offsets

    auto bump = [&](double d) {
        double t = d / rho;
        double q = 1 - t * t;
        return q > 0 ? std::exp(-1.0 / q) : 0.0;
    };

    // Full symmetric kernel everywhere; samples outside the grid come from
    // one-sided linear extrapolation of the edge values. A clipped or
    // renormalized kernel would be asymmetric and bend even linear data.
    auto sample = [&](int ki, int kj) {
        int ci = std::clamp(ki, 0, m - 1);
        int cj = g.dim == 2 ? std::clamp(kj, 0, m - 1) : 0;
        double val = field[g.index(ci, cj)];
        if (ki != ci) {
            int dir = ki > ci ? 1 : -1;
            double slope = (field[g.index(ci, cj)] - field[g.index(ci - dir, cj)]) / h;
            val += slope * std::abs(ki - ci) * h;
        }
        if (g.dim == 2 && kj != cj) {
            int dir = kj > cj ? 1 : -1;
            double slope = (field[g.index(ci, cj)] - field[g.index(ci, cj - dir)]) / h;
            val += slope * std::abs(kj - cj) * h;
        }
        return val;
    };

    ScalarField out(g);
    if (g.dim == 1) {
        double wsum = 0;
        for (int di = -w; di <= w; ++di) wsum += bump(std::abs(di) * h);
        for (int i = 0; i < m; ++i) {
            double acc = 0;
            for (int di = -w; di <= w; ++di)
                acc += bump(std::abs(di) * h) * sample(i + di, 0);
            out[i] = acc / wsum;
        }
    } else {
        double wsum = 0;
        for (int dj = -w; dj <= w; ++dj)
            for (int di = -w; di <= w; ++di) wsum += bump(std::hypot(di * h, dj * h));
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                double acc = 0;
                for (int dj = -w; dj <= w; ++dj)
                    for (int di = -w; di <= w; ++di) {
                        double wk = bump(std::hypot(di * h, dj * h));
                        if (wk == 0) continue;
                        acc += wk * sample(i + di, j + dj);
                    }
                out[g.index(i, j)] = acc / wsum;
            }
    }
    return out;
}

double sup_norm(const ScalarField& field) {
    double s = 0;
    for (double v : field.values) s = std::max(s, std::abs(v));
    return s;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

ScalarField sample_cost(const CostFunction& f, const Grid& grid) {
    ScalarField out(grid);
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
        auto p = grid.point(idx);
        out[idx] = f.value(std::span<const double>(p.data(), grid.dim));
    }
    return out;
}

double subsolution_constant(const CostFunction& f, int dim) {
    double fmax = 0;
    const int samples = 65;
    if (dim == 1) {
        for (int i = 0; i < samples; ++i) {
            double x = -1 + 2.0 * i / (samples - 1);
            fmax = std::max(fmax, f.value(std::span<const double>(&x, 1)));
        }
    } else {
        for (int i = 0; i < samples; ++i)
            for (int j = 0; j < samples; ++j) {
                std::array<double, 2> x = {-1 + 2.0 * i / (samples - 1),
                                           -1 + 2.0 * j / (samples - 1)};
                if (x[0] * x[0] + x[1] * x[1] > 1) continue;
                fmax = std::max(fmax, f.value(x));
            }
    }
    return dim + fmax;
}

}  // namespace ergeig
