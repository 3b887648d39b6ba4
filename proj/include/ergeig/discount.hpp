#pragma once

#include "ergeig/core.hpp"
#include "ergeig/penalty.hpp"

#include <cstdint>
#include <vector>

namespace ergeig {

enum class Backend { Direct, Penalty };

struct DeltaRecord {
    double delta = 0;
    double lambda = 0;       // delta * u at the nodal argmin
    double u_min = 0;
    double u_sup = 0;        // sup of the normalized field u - min u
    int iterations = 0;
    double residual_sup = 0;
};

struct DiscountLoopConfig {
    int max_levels = 16;       // schedule delta_k = 2^{-k}, k = 0..max_levels-1
    double lambda_tol = 1e-4;  // stop when |lambda_k - lambda_{k-1}| <= tol*(1+|lambda_k|)
    // free-boundary detection: centered |D_h u| < 1 - slack. The gradient
    // leaves 1 quadratically at the interface, so the detected radius is
    // biased inward by ~sqrt(slack); keep the slack small.
    double edge_slack = 1e-4;
    PenaltyConfig penalty;     // backend settings; empty schedule -> defaults()

    void validate() const;
};

/// Vanishing-discount limit: lambda* with the normalized u* (min 0) and
/// the detected free region Omega_0.
struct EigenSolution {
    Backend backend = Backend::Direct;
    double lambda_star = 0;
    double lambda_richardson = 0;  // 2*lambda_k - lambda_{k-1}, reported alongside
    double delta_final = 0;
    ScalarField u_star;            // normalized: min value 0
    std::size_t argmin = 0;
    std::vector<std::uint8_t> omega0;
    std::vector<DeltaRecord> history;
    bool lambda_sequence_cauchy = true;  // false if |increments| ever grew
};

/// Runs the backend along delta_k = 2^{-k} with warm starts (the previous
/// field shifted by lambda_prev*(1/delta_next - 1/delta_prev)) until the
/// lambda increments meet lambda_tol. Throws SolverError if the schedule
/// is exhausted or the free region comes out empty.
EigenSolution run_vanishing_discount(const CostFunction& f, const Grid& grid,
                                     Backend backend, const SolverTolerances& tol,
                                     const DiscountLoopConfig& config = {});

/// |delta*u(x0) - delta*u(y0)| for grid nodes x0, y0.
double base_point_insensitivity(const ScalarField& u, double delta,
                                std::size_t x0, std::size_t y0);

/// Interior nodes with centered |D_h u| < 1 - edge_slack.
std::vector<std::uint8_t> free_boundary(const ScalarField& u_star, double edge_slack);

/// Largest node radius inside a free-region mask (0 if empty).
double mask_radius(const Grid& grid, const std::vector<std::uint8_t>& mask);

}  // namespace ergeig
