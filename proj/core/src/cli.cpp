#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "hessflow/scenario.hpp"

namespace hessflow {

namespace {

ScenarioConfig load(const std::string& what) {
  if (auto builtin = find_builtin(what)) return *builtin;
  if (!std::filesystem::exists(what))
    throw ConfigError("'" + what + "' is neither a builtin scenario nor a config file");
  return parse_config_file(what);
}

unsigned threads_from_env() {
  const char* env = std::getenv("AFFINE_FLOW_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError("AFFINE_FLOW_THREADS must be a non-negative integer");
  return static_cast<unsigned>(v);
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affine harmonic map heat flow on Hessian domains", "hessflow"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Print builtin scenarios and catalog names");

  std::string validate_target;
  auto* validate = app.add_subcommand("validate", "Check a config (or builtin) without running it");
  validate->add_option("config", validate_target, "Config file or builtin scenario name")->required();

  std::string run_target;
  std::string output_dir;
  auto* run = app.add_subcommand("run", "Run a scenario and write trace.csv, final.snapshot, report.txt");
  run->add_option("config", run_target, "Config file or builtin scenario name")->required();
  run->add_option("-o,--output", output_dir, "Output directory (overrides the config's output key)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (*list) {
    out << "scenarios:\n";
    for (const auto& name : builtin_names()) out << "  " << name << '\n';
    out << "potentials:\n  quadratic(A)\n  sum_exp\n  log_sum_exp\n";
    out << "targets:\n  euclidean(n)\n  flat_torus(periods)\n  circle\n  hyperbolic_half_plane\n";
    out << "metric fields:\n  identity\n  identity(c)\n  sheared_torus\n";
    out << "initial maps:\n  constant\n  linear_modes\n  boundary_loop\n  counterexample_lift\n";
    return 0;
  }

  try {
    if (*validate) {
      const ScenarioConfig cfg = load(validate_target);
      const BuiltScenario built = build_scenario(cfg);
      out << cfg.name << ": ok (" << built.grid.node_count() << " nodes, dt = " << built.dt
          << ", target " << built.initial.chart->name() << ")\n";
      return 0;
    }

    ScenarioConfig cfg = load(run_target);
    cfg.flow.threads = threads_from_env();
    const std::filesystem::path dir = output_dir.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(output_dir);
    const ScenarioReport report = run_scenario(cfg, dir);
    out << cfg.name << ": " << to_string(report.outcome) << " (expected "
        << to_string(report.expected) << ") after " << report.steps << " steps, sup residual "
        << report.final_residual << ", sup kinetic " << report.final_kinetic << '\n';
    out << "wrote " << report.trace_path.string() << ", " << report.snapshot_path.string() << '\n';
    if (!report.kinetic_monotone) err << "warning: sup kinetic density increased beyond tolerance\n";
    return report.acceptable() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ChartExit& e) {
    err << "flow aborted: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace hessflow
