#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swingsim/integrator.hpp"
#include "swingsim/lyapunov.hpp"

namespace swingsim {

enum class OutputKind { Trajectory, VerdictGrid, LevelSet, Constants };

struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;  // >= 1; n == 1 collapses the axis onto lo

  double at(int i) const;
};

/// Grid of initial conditions, row-major over (delta, omega): delta is the
/// outer (row) axis when present, omega the inner one.
struct GridSpec {
  std::optional<AxisSpec> delta;  // rad
  AxisSpec omega;                 // rad/s

  int rows() const { return delta ? delta->n : 1; }
  int cols() const { return omega.n; }
  int cells() const { return rows() * cols(); }
};

enum class LyapPolicy { Auto, None, Fixed };

struct ScenarioSpec {
  std::string name = "custom";
  std::vector<ModelKind> models;
  GeneratorParams params;
  std::vector<SimState> initials;
  std::optional<GridSpec> grid;
  IntegrationConfig integration;
  std::vector<OutputKind> outputs;
  LyapPolicy lyap_policy = LyapPolicy::Auto;
  RoaKind lyap_fixed = RoaKind::OmegaS;
  int levelset_resolution = 256;
};

/// Named presets: example1, example2, example3, smib-compare, smib-roa.
ScenarioSpec scenario_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses the documented JSON schema (top-level keys scenario, model(s),
/// params, initial, integration, outputs, levelset_resolution). A "scenario"
/// key overlays the remaining fields onto that preset. Throws InvalidConfig
/// with a field path on any problem.
ScenarioSpec parse_scenario(const nlohmann::json& doc);

/// Reads and parses a config file; parse errors carry a line number.
ScenarioSpec load_scenario_file(const std::string& path);

// ---- Operations -------------------------------------------------------------

struct CellResult {
  SimState initial;
  bool in_set = false;
  bool exceptional = false;
  Verdict verdict = Verdict::MaxTime;
  SimState final_state;
  double t_end = 0.0;
};

struct SweepResult {
  GridSpec grid;
  RoaKind set_kind = RoaKind::SmibLevelSet;
  RoaSet set;
  std::vector<CellResult> cells;  // row-major, independent of worker order
  /// False when any non-exceptional in-set cell failed to converge; callers
  /// treat that as an acceptance violation, not just data.
  bool all_in_set_converged = true;
};

/// Integrates every grid cell of the (single-model) scenario, tagging each
/// with level-set membership. Fans out across SWINGSIM_THREADS workers.
SweepResult basin_sweep(const ScenarioSpec& spec);

struct LevelSetPolyline {
  std::vector<std::string> columns;            // e.g. {"delta", "omega"}
  std::vector<std::array<double, 2>> points;   // ordered along the boundary
  bool one_dimensional = false;                // only points[i][0] meaningful
};

/// Ordered points on {energy == level}, found by per-ray bisection from the
/// set's equilibrium. One-dimensional sets return their two endpoints.
LevelSetPolyline level_set_sample(const RoaSet& set, int resolution);

struct ModelRun {
  ModelKind model = ModelKind::ImprovedLoad;
  int initial_index = 0;
  Trajectory trajectory;
};

struct ScenarioResult {
  std::vector<ModelRun> runs;
  std::optional<SweepResult> sweep;
  std::vector<std::pair<RoaKind, LevelSetPolyline>> level_sets;
  nlohmann::ordered_json constants;  // filled when Constants is requested
};

enum class FileFormat { Csv, Json };

/// Executes the scenario's requested outputs in-memory.
ScenarioResult run_scenario(const ScenarioSpec& spec);

/// Writes result files under out_dir and a human-readable summary (the only
/// place frequencies appear in Hz) to the stream.
void write_outputs(const ScenarioSpec& spec, const ScenarioResult& result,
                   const std::string& out_dir, FileFormat format,
                   std::ostream& summary);

/// Constants report for the scenario parameters: discriminant and load
/// equilibria always; level-set constants when a coupling is configured.
nlohmann::ordered_json constants_report(const GeneratorParams& p);

/// Worker count: SWINGSIM_THREADS when set, hardware concurrency otherwise.
int worker_count();

}  // namespace swingsim
