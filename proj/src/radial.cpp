#include "ergeig/radial.hpp"

#include <cmath>

namespace ergeig {

namespace {

double simpson(const std::function<double(double)>& fn, double a, double b,
               double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& fn, double a, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = fn(lm), frm = fn(rm);
    double left = simpson(fn, a, m, fa, flm, fm);
    double right = simpson(fn, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(fn, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_step(fn, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol) {
    if (a == b) return 0.0;
    double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
    double whole = simpson(fn, a, b, fa, fm, fb);
    return adaptive_step(fn, a, b, fa, fm, fb, whole, tol, 48);
}

namespace {

// phi'(r0) - 1 as a function of the trial free-boundary radius, with
// lambda eliminated through the pasting identity lambda = f0(r0) + (n-1)/r0.
double slope_residual(const CostFunction& f, int n, double r) {
    double lambda = f.radial_value(r) + (n - 1) / r;
    double moment = adaptive_simpson(
        [&](double s) { return std::pow(s, n - 1) * f.radial_value(s); }, 0.0, r, 1e-13);
    return lambda * r / n - std::pow(r, 1 - n) * moment - 1.0;
}

double ergodic_slope(const CostFunction& f, int n, double lambda, double r) {
    if (r <= 0) return 0.0;
    double integral = adaptive_simpson(
        [&](double s) { return std::pow(s, n - 1) * (lambda - f.radial_value(s)); },
        0.0, r, 1e-13);
    return std::pow(r, 1 - n) * integral;
}

}  // namespace

std::pair<double, double> radial_eigen(const CostFunction& f, int dim) {
    if (!f.is_radial())
        throw ValidationError("radial_eigen requires a rotational cost");
    const double r_search_max = 1e6;

    double lo = 1e-3;
    double flo = slope_residual(f, dim, lo);
    while (flo > 0 && lo > 1e-12) {
        lo *= 0.5;
        flo = slope_residual(f, dim, lo);
    }
    double hi = lo;
    double fhi = flo;
    while (fhi <= 0) {
        hi *= 2;
        if (hi > r_search_max)
            throw SolverError("radial_eigen: no bracket found; cost is not superlinear?");
        fhi = slope_residual(f, dim, hi);
    }
    // bisection to relative accuracy well below 1e-10
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * (1 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = slope_residual(f, dim, mid);
        if (fm <= 0) lo = mid; else hi = mid;
    }
    double r0 = 0.5 * (lo + hi);
    double lambda = f.radial_value(r0) + (dim - 1) / r0;
    return {lambda, r0};
}

RadialSolution radial_profile(const CostFunction& f, int dim, double lambda,
                              double r0, const std::vector<double>& r_grid) {
    RadialSolution sol;
    sol.dim = dim;
    sol.lambda = lambda;
    sol.r0 = r0;
    sol.r = r_grid;
    sol.phi.resize(r_grid.size());
    sol.dphi.resize(r_grid.size());
    sol.d2phi.resize(r_grid.size());

    auto slope = [&](double r) {
        if (r >= r0) return 1.0;
        return ergodic_slope(f, dim, lambda, r);
    };

    double phi_acc = 0.0, r_prev = 0.0;
    double phi_at_r0 = -1.0;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        double r = r_grid[k];
        if (r <= r0) {
            phi_acc += adaptive_simpson(slope, r_prev, r, 1e-12);
            r_prev = r;
            sol.phi[k] = phi_acc;
            sol.dphi[k] = slope(r);
            sol.d2phi[k] = (r == 0)
                               ? (lambda - f.radial_value(0)) / dim
                               : lambda - f.radial_value(r) - (dim - 1) / r * sol.dphi[k];
        } else {
            if (phi_at_r0 < 0) {
                phi_acc += adaptive_simpson(slope, r_prev, r0, 1e-12);
                phi_at_r0 = phi_acc;
                r_prev = r0;
            }
            sol.phi[k] = phi_at_r0 + (r - r0);
            sol.dphi[k] = 1.0;
            sol.d2phi[k] = 0.0;
        }
    }

    // phi''(r0-) through the one-sided ODE limit, plus the slope pasting
    // residual left by the root-finder.
    double slope_r0 = ergodic_slope(f, dim, lambda, r0);
    double ode_limit = lambda - f.radial_value(r0) - (dim - 1) / r0 * slope_r0;
    sol.pasting_defect = std::max(std::abs(ode_limit), std::abs(slope_r0 - 1.0));
    return sol;
}

namespace {

struct ShootResult {
    bool hit = false;
    double r_hit = 0, phi_hit = 0, defect = 0;
    std::vector<double> rs, phis, slopes;  // dense trace up to the hit
};

// Integrate phi'' = delta*phi - ((n-1)/r) phi' - f0 from r ~ 0 with
// phi(0) = a, phi'(0) = 0 until phi' reaches 1.
ShootResult shoot(const CostFunction& f, int n, double delta, double a,
                  bool keep_trace) {
    const double r_eps = 1e-6, dr = 2e-4, r_max = 200.0;
    double c = (delta * a - f.radial_value(0)) / (2 * n);
    double r = r_eps, phi = a + c * r * r, slope = 2 * c * r;
    auto rhs = [&](double rr, double p, double s) {
        return delta * p - (n - 1) / rr * s - f.radial_value(rr);
    };
    ShootResult out;
    if (keep_trace) {
        out.rs.push_back(0); out.phis.push_back(a); out.slopes.push_back(0);
    }
    while (r < r_max) {
        if (keep_trace) {
            out.rs.push_back(r); out.phis.push_back(phi); out.slopes.push_back(slope);
        }
        double k1p = slope, k1s = rhs(r, phi, slope);
        double k2p = slope + 0.5 * dr * k1s, k2s = rhs(r + 0.5 * dr, phi + 0.5 * dr * k1p, slope + 0.5 * dr * k1s);
        double k3p = slope + 0.5 * dr * k2s, k3s = rhs(r + 0.5 * dr, phi + 0.5 * dr * k2p, slope + 0.5 * dr * k2s);
        double k4p = slope + dr * k3s, k4s = rhs(r + dr, phi + dr * k3p, slope + dr * k3s);
        double phi_next = phi + dr / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        double slope_next = slope + dr / 6 * (k1s + 2 * k2s + 2 * k3s + k4s);
        double r_next = r + dr;
        if (slope_next >= 1.0) {
            double t = (1.0 - slope) / (slope_next - slope);
            out.hit = true;
            out.r_hit = r + t * dr;
            out.phi_hit = phi + t * (phi_next - phi);
            out.defect = rhs(out.r_hit, out.phi_hit, 1.0);
            if (keep_trace) {
                out.rs.push_back(out.r_hit);
                out.phis.push_back(out.phi_hit);
                out.slopes.push_back(1.0);
            }
            return out;
        }
        if (slope_next < -10.0) break;  // a far too small
        r = r_next; phi = phi_next; slope = slope_next;
    }
    out.hit = false;
    out.defect = -1e9;
    return out;
}

}  // namespace

RadialSolution radial_discounted(const CostFunction& f, int dim, double delta,
                                 const std::vector<double>& r_grid) {
    if (!f.is_radial())
        throw ValidationError("radial_discounted requires a rotational cost");
    if (delta <= 0)
        throw ValidationError("delta must be positive");

    auto defect = [&](double a) { return shoot(f, dim, delta, a, false).defect; };

    double lo = 0.0;
    if (defect(lo) > 0)
        throw SolverError("radial_discounted: shooting bracket failed at a = 0");
    double hi = 1.0;
    int expand = 0;
    while (defect(hi) <= 0) {
        hi *= 2;
        if (++expand > 60)
            throw SolverError("radial_discounted: shooting failed to bracket");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (defect(mid) <= 0) lo = mid; else hi = mid;
    }
    double a = 0.5 * (lo + hi);
    ShootResult tr = shoot(f, dim, delta, a, true);
    if (!tr.hit) {
        // the midpoint can land on the undershooting side of the bracket;
        // hi always comes from a hitting shot
        a = hi;
        tr = shoot(f, dim, delta, a, true);
    }
    if (!tr.hit)
        throw SolverError("radial_discounted: shooting did not converge");

    RadialSolution sol;
    sol.dim = dim;
    sol.lambda = delta * a;
    sol.r0 = tr.r_hit;
    sol.r = r_grid;
    sol.phi.resize(r_grid.size());
    sol.dphi.resize(r_grid.size());
    sol.d2phi.resize(r_grid.size());
    sol.pasting_defect = std::abs(tr.defect);

    std::size_t cursor = 1;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        double r = r_grid[k];
        if (r >= tr.r_hit) {
            sol.phi[k] = tr.phi_hit + (r - tr.r_hit);
            sol.dphi[k] = 1.0;
            sol.d2phi[k] = 0.0;
            continue;
        }
        while (cursor + 1 < tr.rs.size() && tr.rs[cursor] < r) ++cursor;
        double rl = tr.rs[cursor - 1], rr = tr.rs[cursor];
        double t = (rr > rl) ? (r - rl) / (rr - rl) : 0.0;
        sol.phi[k] = tr.phis[cursor - 1] + t * (tr.phis[cursor] - tr.phis[cursor - 1]);
        sol.dphi[k] = tr.slopes[cursor - 1] + t * (tr.slopes[cursor] - tr.slopes[cursor - 1]);
        sol.d2phi[k] = delta * sol.phi[k] -
                       (r > 0 ? (dim - 1) / r * sol.dphi[k] : 0.0) - f.radial_value(r);
    }
    return sol;
}

}  // namespace ergeig
