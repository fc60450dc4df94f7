#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "panel/errors.hpp"

using namespace panel;
using namespace panel::cli;

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear panel flutter lab"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config;
  RunOptions opts;
  std::string out = "out";
  std::uint64_t seed = 0;
  long max_steps = 0;
  std::string resume;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "Scenario INI file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override the initial-data seed");
  };
  auto* sim = app.add_subcommand("simulate", "Integrate a scenario in time");
  add_common(sim, true);
  sim->add_option("--max-steps", max_steps, "Stop after this many steps")->check(CLI::PositiveNumber);
  sim->add_option("--resume", resume, "Checkpoint base path to continue from");
  sim->add_flag("--no-timing", opts.omit_timing, "Omit wall time from the manifest");
  auto* eq = app.add_subcommand("equilibria", "Continuation sweep of static equilibria");
  add_common(eq, true);
  auto* probe = app.add_subcommand("kjc-probe", "Tables of the KJC symbol and Hilbert solvers");
  add_common(probe, true);
  auto* cmp = app.add_subcommand("compare-closures", "Piston against delayed potential");
  add_common(cmp, true);
  app.add_subcommand("selftest", "Quick built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  opts.out = out;
  for (auto* s : {sim, eq, probe, cmp})
    if (s->count("--seed")) opts.seed = seed;
  if (sim->count("--max-steps")) opts.max_steps = max_steps;
  if (sim->count("--resume")) opts.resume = resume;

  try {
    if (app.got_subcommand("selftest")) return selftest() ? kOk : kCheckFailed;
    const ScenarioConfig cfg = load_scenario(config);
    if (app.got_subcommand(sim)) {
      const SimulationResult r = simulate(cfg, opts);
      std::cout << "simulate: steps " << r.first_step << ".." << r.first_step + r.rows.size() - 1
                << (r.finished ? " (finished)" : " (checkpointed)") << ", output in " << opts.out << '\n';
    } else if (app.got_subcommand(eq)) {
      const EquilibriumBranch b = equilibria(cfg, opts);
      std::cout << "equilibria: " << b.points.size() << " points, output in " << opts.out << '\n';
    } else if (app.got_subcommand(probe)) {
      kjc_probe(cfg, opts);
      std::cout << "kjc-probe: output in " << opts.out << '\n';
    } else if (app.got_subcommand(cmp)) {
      const ClosureComparison c = compare_closures(cfg, opts);
      for (const auto& r : c.rows)
        std::cout << "U=" << r.U << " sup=" << r.sup_distance << " terminal=" << r.terminal_distance << '\n';
      std::cout << "monotone in U: " << (c.monotone_decreasing ? "yes" : "no") << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "numerical divergence at step " << e.step() << ": " << e.what() << '\n';
    return kDivergence;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kOk;
}
