#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panel/integrator.hpp"
#include "panel/stationary.hpp"

namespace panel {

/// Initial displacement and velocity.
///
/// Shapes: `zero`; `bump`, a sin^2(mx pi x) sin^2(my pi y) hump; `random`, a seeded
/// combination of such humps; `file`, a field written by write_field.
/// The velocity is `velocity` times the same shape.
struct InitialSpec {
  std::string shape = "zero";
  double amplitude = 0.0;
  double velocity = 0.0;
  int mx = 1;
  int my = 1;
  int modes = 4;  ///< humps mixed by `random`
  std::uint64_t seed = 1;
  std::string file;
  /// `flat` holds the initial state over the delay window; `rest` uses the undeformed plate.
  std::string prehistory = "flat";
};

struct OutputSpec {
  int stride = 1;           ///< every stride-th diagnostics row goes to the CSV
  int snapshot_stride = 0;  ///< 0 disables field snapshots
  bool checkpoint = true;   ///< final checkpoint for restarts
};

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> values;
  double tol = 1e-10;
  int max_iter = 50;
  bool stability = true;
  bool branch_switch = true;
};

struct CompareSpec {
  std::vector<double> U_values{2.0, 4.0, 8.0};
  double T = 0.0;  ///< 0 takes the run horizon
};

struct KjcProbeSpec {
  double U = 0.6;
  double alpha_lp = 0.5;
  int homogeneity_points = 1000;
  std::vector<int> nodes{32, 64, 128, 256};
  int time_steps = 32;
  double dt = 0.25;
};

/// A parsed scenario file. Keys are echoed into run manifests in file order.
struct ScenarioConfig {
  explicit ScenarioConfig(const Grid& g) : grid(g), params(g) {}

  std::string name;
  std::filesystem::path source;
  Grid grid;
  ModelParams params;
  std::string load = "uniaxial";  ///< F0 = lambda * shape: uniaxial -y^2/2 or biaxial -(x^2+y^2)/2
  double lambda = 0.0;
  double pressure = 0.0;          ///< uniform p0
  double dt = 0.0;                ///< 0 selects default_dt
  double T = 0.0;
  bool nonlinear = true;
  int n_theta = 32;
  int n_s = 0;                    ///< 0 selects ds close to dt
  InitialSpec initial;
  OutputSpec output;
  std::optional<SweepSpec> sweep;
  CompareSpec compare;
  KjcProbeSpec kjc;
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Parses INI text. Throws ConfigError naming "section.key" and the line.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// The config with the flow speed (and the delay quadrature) replaced.
ScenarioConfig with_flow_speed(const ScenarioConfig& cfg, double U, Closure closure);

PlateState initial_state(const ScenarioConfig& cfg);
/// Delay quadrature for the configured closure (t_star = 0 unless delayed).
DelayQuadrature delay_quadrature(const ScenarioConfig& cfg, double dt);
/// Configured step, or default_dt when unset.
double effective_dt(const ScenarioConfig& cfg);
IntegratorOptions integrator_options(const ScenarioConfig& cfg);
/// History before t = 0 according to `initial.prehistory`.
HistoryBuffer initial_history(const ScenarioConfig& cfg, const TimeIntegrator& ti,
                              const PlateState& s0);

}  // namespace panel
