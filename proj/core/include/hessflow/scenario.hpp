#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hessflow/flow.hpp"

namespace hessflow {

enum class MetricKind { FromPotential, ExplicitField };

struct MetricSource {
  MetricKind kind = MetricKind::ExplicitField;
  /// Potential catalog ref ("sum_exp", "quadratic(...)") or field name
  /// ("identity", "identity(c)", "sheared_torus").
  std::string name = "identity";
};

/// Initial map catalog entry plus its parameters.
struct InitialMapSpec {
  /// "constant", "linear_modes", "boundary_loop", "counterexample_lift".
  std::string name = "constant";
  std::vector<double> value;    // constant value / interior seed
  std::vector<long> degree;     // linear_modes: target_dim x domain_dim, row-major
  std::vector<double> offset;   // linear_modes: constant term per component
  std::vector<double> modes;    // linear_modes: groups (component, k_1..k_d, amplitude, phase)
  std::vector<double> center;   // boundary_loop
  std::vector<double> radius;   // boundary_loop
};

struct ScenarioConfig {
  std::string name;
  GridSpec domain;
  MetricSource metric;
  std::string target = "euclidean(1)";
  InitialMapSpec initial;
  FlowConfig flow;
  Outcome expected_outcome = Outcome::Converged;
  std::string output;
};

/// Parses the flat `key = value` format. Throws ConfigError with line/field.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig parse_config_file(const std::filesystem::path& path);
/// Inverse of parse_config (round-trips every field).
std::string format_config(const ScenarioConfig& cfg);

ScenarioConfig builtin_counterexample();
ScenarioConfig builtin_flat_convergent();
ScenarioConfig builtin_dirichlet_hyperbolic();

std::vector<std::string> builtin_names();
std::optional<ScenarioConfig> find_builtin(const std::string& name);

/// Grid, initial map and resolved step built from a config.
struct BuiltScenario {
  DomainGrid grid;
  MapField initial;
  FlowConfig flow;
  double dt;
};

/// Resolves every catalog name and checks all invariants (including the CFL
/// bound). Throws ConfigError naming the offending field.
BuiltScenario build_scenario(const ScenarioConfig& cfg);

struct ScenarioReport {
  std::string name;
  Outcome outcome = Outcome::MaxTimeReached;
  Outcome expected = Outcome::Converged;
  double final_residual = 0.0;
  double final_kinetic = 0.0;
  bool kinetic_monotone = true;
  std::size_t steps = 0;
  double dt = 0.0;
  std::filesystem::path trace_path;
  std::filesystem::path snapshot_path;
  double wall_seconds = 0.0;

  /// Converged, or the outcome the config declared as expected.
  bool acceptable() const { return outcome == Outcome::Converged || outcome == expected; }
};

/// Runs the scenario and writes trace.csv, final.snapshot and report.txt into `output_dir`.
ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& output_dir);

void write_report(std::ostream& os, const ScenarioReport& report);

/// CLI entry: `list`, `validate <config-or-builtin>`, `run <config-or-builtin> [-o dir]`.
/// Exit codes: 0 acceptable outcome, 1 unexpected outcome, 2 configuration error.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hessflow
