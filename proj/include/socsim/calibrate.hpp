#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "socsim/abm.hpp"
#include "socsim/metrics.hpp"

namespace socsim::calib {

// Ordered sweep axes for one model kind. Expansion is row-major with the
// last axis varying fastest, so the combination order is reproducible from
// the grid alone.
struct ParameterGrid {
  abm::ModelKind kind = abm::ModelKind::bc;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};

// Canonical sweep parameter names per kind, in axis order.
std::vector<std::string> parameter_names(abm::ModelKind kind);

// Maps table-style alias names (bc_bound, init_uct, tho) onto canonical
// parameter names; other names pass through.
std::string canonical_parameter_name(const std::string& name);

// Reads {"model": "bc", "alpha": [...], "epsilon": [...]} style JSON. Alias
// keys from the published parameter tables are accepted: bc_bound for the
// confidence bound, init_uct for the uncertainty term, tho for rho. A
// missing axis falls back to the model's default value; an unknown key is
// rejected.
ParameterGrid grid_from_json(const nlohmann::json& json);

// Parameter values applied on top of the kind's defaults. Unknown names
// throw std::invalid_argument.
abm::ModelParams params_from_values(
    abm::ModelKind kind,
    const std::vector<std::pair<std::string, double>>& values);

// Name/value view of a parameter set, axis order.
std::vector<std::pair<std::string, double>> params_to_values(
    const abm::ModelParams& params);

// Cartesian expansion in grid order; every combination is range-validated
// before anything runs.
std::vector<abm::ModelParams> expand(const ParameterGrid& grid);

struct CalibrationEntry {
  abm::ModelParams params;
  double delta_bias = 0.0;       // mean over replications
  double delta_diversity = 0.0;  // mean over replications
  double objective = 0.0;        // delta_bias + delta_diversity
};

struct CalibrationResult {
  std::size_t best_index = 0;
  std::vector<CalibrationEntry> table;  // grid order
  const CalibrationEntry& best() const { return table.at(best_index); }
};

struct CalibrationOptions {
  int replications = 5;
  int workers = 1;
  abm::StepOptions step;
};

// Grid search against an empirical (round, mean, std) series. Every
// combination runs `replications` times from the same initial population;
// run r of combination c uses the seed derived from (seed, c, r), so adding
// rows to the grid never perturbs other rows. Scoring is the mean
// |bias_sim - bias_real| + |diversity_sim - diversity_real|; ties prefer the
// lower delta-bias, then the earlier grid position. The simulated horizon
// equals the empirical series length.
CalibrationResult calibrate(const ParameterGrid& grid,
                            const std::vector<abm::OrdinaryAgent>& initial,
                            const metrics::SeriesSummary& empirical,
                            std::uint64_t seed,
                            const CalibrationOptions& options = {});

// Full result table: one row per combination with its parameter values,
// deltas and objective; the chosen row is flagged.
void write_table_csv(const CalibrationResult& result, std::ostream& out);

// Copies calibrated parameters onto target. The kinds must match; applying
// the same entry twice leaves target unchanged.
void apply_calibrated(const abm::ModelParams& calibrated,
                      abm::ModelParams& target);

}  // namespace socsim::calib
