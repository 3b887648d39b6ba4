#pragma once

#include "ergeig/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ergeig {

inline constexpr const char* kVersion = "0.1.0";

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Executes the configured subcommand: writes result.json plus any field
/// tables into the output directory and prints one summary line per
/// lambda estimate to `out`. Returns the process exit code (0 success,
/// 4 when crosscheck criteria fail). Validation and solver problems are
/// reported by throwing ValidationError / SolverError.
int run(const RunConfig& config, std::ostream& out);

/// The full acceptance ladder on its pinned reference configurations.
/// `seed` feeds the Monte Carlo criteria; `progress`, when non-null,
/// receives one PASS/FAIL line per criterion.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                            std::ostream* progress);

}  // namespace ergeig
