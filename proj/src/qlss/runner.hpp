#pragma once

#include "qlss/config.hpp"
#include "qlss/verify.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace qlss {

extern const char* kVersion;

// Static admissibility report: nonlinearity hypotheses, resolved plateau
// threshold and its smallness condition, sampled coupling bounds, grid vs
// confinement-region consistency.  Never throws on mathematical failures;
// they land in report["errors"] and ok == false.  (Malformed configs still
// throw config_error before this point.)
struct PreflightOutcome {
    bool ok = false;
    nlohmann::json report;
};
PreflightOutcome preflight(const RunConfig& cfg);

struct SolveOutcome {
    bool ok = false;             // every eps converged and verified
    nlohmann::json report;
};

// Runs the mountain-pass pipeline for each requested eps (the override
// replaces the whole list), verifies, and writes per-eps artifacts plus a
// manifest under output_dir.  Throws precondition_error when preflight
// reports a hard failure.
SolveOutcome run_solve(const RunConfig& cfg,
                       std::optional<double> epsilon_override = std::nullopt,
                       std::optional<std::string> output_dir_override = std::nullopt);

// run_solve over the full epsilon_list plus the aggregated trend table
// (boundary maxima, energies, norm ratios) written as CSV + JSON.
SolveOutcome run_sweep(const RunConfig& cfg,
                       std::optional<std::string> output_dir_override = std::nullopt);

// t, f, f', f'' table; path empty -> stdout.
void write_transform_table(double t_min, double t_max, double t_step,
                           const std::string& path);

} // namespace qlss
