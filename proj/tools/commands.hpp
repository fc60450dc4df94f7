#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "panel/scenario.hpp"

namespace panel::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kDivergence = 3, kSolverFailure = 4 };

struct RunOptions {
  std::filesystem::path out = "out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  /// Stop after this many steps (simulate); the checkpoint allows resuming.
  std::optional<long> max_steps;
  /// Resume from a checkpoint base path written by a previous simulate.
  std::optional<std::filesystem::path> resume;
  /// Suppress manifest timing so outputs are byte-identical across runs.
  bool omit_timing = false;
};

struct SimulationResult {
  explicit SimulationResult(const Grid& g) : final_state(PlateState::zero(g)) {}
  long first_step = 0;
  std::vector<DiagnosticsRow> rows;  ///< first row is the starting state
  PlateState final_state;
  double dt = 0.0;
  double balance_cum = 0.0;
  bool finished = false;  ///< reached T
};

/// Writes trajectory.csv (appended when resuming), snapshots, checkpoint and manifest.json.
SimulationResult simulate(const ScenarioConfig& cfg, const RunOptions& opts);

/// Continuation sweep from [sweep]; writes branch.csv and manifest.json.
EquilibriumBranch equilibria(const ScenarioConfig& cfg, const RunOptions& opts);

/// Symbol sweeps and round-trip tables of the KJC probe.
void kjc_probe(const ScenarioConfig& cfg, const RunOptions& opts);

/// Distances between two closures run from identical data at flow speed U.
struct ClosureDistance {
  double U = 0.0;
  double t_star = 0.0;
  double dt = 0.0;
  long steps = 0;
  double sup_distance = 0.0;       ///< sup over time of |u_a - u_b|_H2
  double terminal_distance = 0.0;  ///< |u_a(T) - u_b(T)|_H2
  double sup_norm = 0.0;           ///< sup over time of |u_a|_H2
};
ClosureDistance closure_distance(const ScenarioConfig& cfg, double U, Closure a, Closure b);

struct ClosureComparison {
  std::vector<ClosureDistance> rows;
  bool monotone_decreasing = false;  ///< sup distance nonincreasing in U
};
/// Piston-classical against delayed-potential over cfg.compare.U_values;
/// writes closures.csv and manifest.json.
ClosureComparison compare_closures(const ScenarioConfig& cfg, const RunOptions& opts);

/// Quick built-in checks; prints one PASS/FAIL line each. Returns true when all pass.
bool selftest();

/// Applies --seed to the config.
ScenarioConfig apply_overrides(ScenarioConfig cfg, const RunOptions& opts);

std::string version();

}  // namespace panel::cli
