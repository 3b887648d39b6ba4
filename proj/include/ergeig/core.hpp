#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ergeig {

/// Uniform tensor grid on the box [-R, R]^n, n in {1, 2}.
/// Nodes on each axis are x_i = -R + i*h with h = 2R/(m-1).
struct Grid {
    int dim = 1;
    double half_width = 4.0;
    int nodes_per_axis = 5;

    static Grid make(int dim, double half_width, int nodes_per_axis);

    double spacing() const { return 2.0 * half_width / (nodes_per_axis - 1); }
    std::size_t node_count() const {
        return dim == 1 ? std::size_t(nodes_per_axis)
                        : std::size_t(nodes_per_axis) * nodes_per_axis;
    }
    double axis_coord(int i) const { return -half_width + i * spacing(); }

    std::size_t index(int i, int j = 0) const {
        return dim == 1 ? std::size_t(i) : std::size_t(j) * nodes_per_axis + i;
    }
    void split(std::size_t idx, int& i, int& j) const {
        if (dim == 1) { i = int(idx); j = 0; }
        else { j = int(idx / nodes_per_axis); i = int(idx % nodes_per_axis); }
    }
    std::array<double, 2> point(std::size_t idx) const {
        int i, j; split(idx, i, j);
        return {axis_coord(i), dim == 2 ? axis_coord(j) : 0.0};
    }
    double radius(std::size_t idx) const;
    bool on_boundary(std::size_t idx) const {
        int i, j; split(idx, i, j);
        int last = nodes_per_axis - 1;
        return i == 0 || i == last || (dim == 2 && (j == 0 || j == last));
    }
};

/// Real nodal data on a Grid.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(g.node_count(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

enum class CostFamily { Quadratic, Power, Anisotropic, RadialTable };

/// Convex superlinear running cost f with value/gradient/Hessian evaluators.
///
/// Built-in families:
///   Quadratic     f(x) = |x|^2
///   Power         f(x) = c*|x|^p, p > 1
///   Anisotropic   f(x) = x . A x, A symmetric positive definite (n = 2)
///   RadialTable   f(x) = f0(|x|) with f0 a convex nondecreasing table
/// plus an additive constant offset. Construction guarantees f >= 0 by
/// shifting up whenever the sampled minimum over the reference box is
/// negative; the applied shift is recorded.
class CostFunction {
public:
    double value(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    void hessian(std::span<const double> x, std::span<double> out) const;  // row-major n*n

    double value1(double x) const { return value(std::span<const double>(&x, 1)); }

    bool is_radial() const { return family_ == CostFamily::Quadratic ||
                                    family_ == CostFamily::Power ||
                                    family_ == CostFamily::RadialTable; }
    /// Radial profile f0(r); only valid when is_radial().
    double radial_value(double r) const;

    int dimension() const { return dim_; }
    CostFamily family() const { return family_; }
    double offset() const { return offset_; }
    double normalization_shift() const { return normalization_shift_; }

    /// Returns a copy with an additional constant added (re-validated for
    /// nonnegativity the same way as make_cost).
    CostFunction shifted(double c) const;

    friend CostFunction make_cost(CostFamily family, const std::vector<double>& params,
                                  int dim, double offset);

private:
    CostFamily family_ = CostFamily::Quadratic;
    int dim_ = 1;
    std::vector<double> params_;
    std::vector<double> table_r_, table_v_;
    double offset_ = 0.0;               // user constant + normalization
    double normalization_shift_ = 0.0;  // part of offset_ added to enforce f >= 0

    double bare_value(std::span<const double> x) const;
    double bare_radial(double r) const;
};

/// Build a cost function, validating convexity/superlinearity metadata.
///   Quadratic:   params empty
///   Power:       params = {c, p}, c > 0, p > 1
///   Anisotropic: params = {a11, a12, a22} (n = 2)
///   RadialTable: params = {r0, v0, r1, v1, ...}, convex nondecreasing
CostFunction make_cost(CostFamily family, const std::vector<double>& params,
                       int dim, double offset = 0.0);

struct SolverTolerances {
    double newton_tol = 1e-9;       // residual sup-norm target
    int max_iters = 100;
    double gradient_slack = 1e-2;   // grid-level slack on |Du| <= 1
    double convexity_slack = 1e-8;

    void validate() const;
};

// ---- discrete calculus -------------------------------------------------

/// Centered first differences per axis; one-sided at the boundary.
std::vector<ScalarField> gradient_central(const ScalarField& field);

/// Euclidean norm of gradient_central, as a field.
ScalarField gradient_central_norm(const ScalarField& field);

/// Standard 3/5-point Laplacian; shifted (one-sided) stencil on the boundary.
ScalarField laplacian_5pt(const ScalarField& field);

/// u(x+z) - 2u(x) + u(x-z) for a node offset z (axis or diagonal, in units
/// of h). Zero where the stencil leaves the grid.
ScalarField second_difference(const ScalarField& field, std::array<int, 2> z);

/// Convolution with a normalized compactly supported bump of radius rho.
/// Out-of-grid samples come from one-sided linear extrapolation of the
/// edge values, so the kernel stays symmetric everywhere: constants and
/// linear data are preserved and the operator is monotone.
ScalarField mollify(const ScalarField& field, double rho);

double sup_norm(const ScalarField& field);
double sup_diff(const ScalarField& a, const ScalarField& b);

/// Sample f on the grid nodes.
ScalarField sample_cost(const CostFunction& f, const Grid& grid);

/// K := n + max_{|x| <= 1} f, sampled.
double subsolution_constant(const CostFunction& f, int dim);

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ergeig
