#pragma once

#include "ergeig/core.hpp"
#include "ergeig/discount.hpp"
#include "ergeig/simulate.hpp"

#include <string>
#include <vector>

namespace ergeig {

/// Everything a run needs, parsed from flat key=value text with dotted
/// section prefixes (cost.*, grid.*, loop.*, tol.*, penalty.*, bounds.*,
/// sim.*, sweep.*, out.*). Echoing and re-parsing round-trips.
struct RunConfig {
    std::string subcommand;  // eigen|radial|bounds|simulate|sweep|crosscheck

    std::string cost_family = "quadratic";
    std::vector<double> cost_params;
    int dim = 1;
    double cost_offset = 0;

    double grid_half_width = 4.0;
    int grid_nodes = 801;

    std::string backend = "direct";  // direct|penalty|both
    SolverTolerances tol;
    DiscountLoopConfig loop;
    double penalty_damping = 1.0;
    std::vector<double> epsilon_schedule;  // empty -> PenaltyConfig::defaults()

    double mollify_radius = 0;  // 0 -> 4h at run time

    SimConfig sim;  // sim.dim is overridden by dim at run time
    std::vector<double> sweep_radii = {0.8, 1.0, 1.145, 1.3, 1.6};

    std::string out_dir;  // empty -> $ERGEIG_OUT, else "."

    CostFunction cost() const;
    Grid grid() const;
    PenaltyConfig penalty_config() const;
    void validate() const;
};

/// Parse key=value lines ('#' comments, blank lines ignored). Throws
/// ValidationError naming the offending key.
RunConfig parse_config(const std::string& text);

/// Apply a single `key=value` override (the --set flag payload).
void apply_override(RunConfig& config, const std::string& assignment);

/// Canonical text form; parse_config(echo_config(c)) reproduces c.
std::string echo_config(const RunConfig& config);

}  // namespace ergeig
