#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hessflow/errors.hpp"
#include "hessflow/io.hpp"
#include "hessflow/scenario.hpp"

using namespace hessflow;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kSmall = R"(# small periodic run
name = small
domain.dim = 2
domain.shape = 8 8
domain.boundary = periodic
metric.source = potential
metric.potential = quadratic(2, 0.5, 0.5, 1)
target = flat_torus(1)
initial.map = linear_modes
initial.degree = 1 0
initial.modes = 0 1 1 0.05 0.2
flow.t_end = 2
flow.tol_residual = 1e-12
flow.monitor_every = 5
)";

ConfigError config_error(const std::string& text) {
  try {
    build_scenario(parse(text));
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError("none", "", 0);
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const ScenarioConfig c = parse(kSmall);
  EXPECT_EQ(c.name, "small");
  EXPECT_EQ(c.domain.shape, (std::vector<std::size_t>{8, 8}));
  EXPECT_EQ(c.metric.kind, MetricKind::FromPotential);
  EXPECT_EQ(c.initial.degree, (std::vector<long>{1, 0}));
  EXPECT_DOUBLE_EQ(c.flow.t_end, 2.0);
  EXPECT_EQ(c.flow.monitor_every, 5u);
  EXPECT_EQ(c.flow.dt, 0.0);
  EXPECT_EQ(c.expected_outcome, Outcome::Converged);
}

TEST(Config, ErrorsCarryLineAndField) {
  try {
    parse("name = x\ndomain.shape = 8 8\nflow.bogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "flow.bogus");
  }
  try {
    parse("name = x\n\ndomain.shape = 8 eight\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "domain.shape");
  }
  try {
    parse("name = x\nname = y\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse("name x\n"), ConfigError);
  EXPECT_THROW(parse("name = x\nflow.scheme = leapfrog\n"), ConfigError);
  EXPECT_THROW(parse("domain.shape = 8 8\n"), ConfigError);  // no name
  try {
    parse(std::string(kSmall) + "metric.field = identity\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), static_cast<int>(std::count(kSmall, kSmall + std::strlen(kSmall), '\n')) + 1);
    EXPECT_EQ(e.field(), "metric.field");
  }
}

TEST(Config, BuildErrorsNameTheField) {
  std::string text = kSmall;
  EXPECT_EQ(config_error(text + "flow.dt = 1\n").field(), "flow.dt");
  EXPECT_EQ(config_error(std::string(kSmall).replace(std::string(kSmall).find("flat_torus(1)"), 13, "klein_bottle")).field(), "target");
  EXPECT_EQ(config_error(std::string(kSmall).replace(std::string(kSmall).find("8 8"), 3, "2 8")).field(), "domain.shape");
}

TEST(Config, FormatRoundTrip) {
  for (const std::string& name : builtin_names()) {
    const ScenarioConfig c = *find_builtin(name);
    const std::string text = format_config(c);
    const ScenarioConfig back = parse(text);
    EXPECT_EQ(format_config(back), text) << name;
  }
  EXPECT_EQ(format_config(parse(kSmall)), format_config(parse(format_config(parse(kSmall)))));
}

TEST(Config, ShippedScenarioFilesMatchBuiltins) {
  for (const std::string& name : builtin_names()) {
    const auto path = std::filesystem::path(HESSFLOW_SCENARIO_DIR) / (name + ".cfg");
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(format_config(parse_config_file(path)), format_config(*find_builtin(name))) << name;
  }
}

TEST(Builtins, Catalog) {
  const auto names = builtin_names();
  for (const char* n : {"counterexample", "flat_convergent", "dirichlet_hyperbolic"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end());
  EXPECT_FALSE(find_builtin("nope").has_value());
  EXPECT_EQ(find_builtin("counterexample")->expected_outcome, Outcome::Diverged);
}

TEST(Builtins, AllBuild) {
  for (const std::string& name : builtin_names()) EXPECT_NO_THROW(build_scenario(*find_builtin(name))) << name;
}

TEST(Builtins, CounterexampleData) {
  const BuiltScenario b = build_scenario(builtin_counterexample());
  // inverse metric at y = 0 is the identity, so the metric is too
  const std::size_t origin = b.grid.node_at(0, 0);
  const auto m = b.grid.inverse_metric(origin);
  EXPECT_EQ(std::vector<double>(m.begin(), m.end()), (std::vector<double>{1, 0, 0, 1}));
  EXPECT_EQ(b.initial.monodromy, (std::vector<std::vector<long>>{{1}, {0}}));
  EXPECT_EQ(b.initial.chart->name(), "circle");
  for (std::size_t k = 0; k < b.grid.node_count(); ++k) {
    const auto x = b.grid.coords(k);
    EXPECT_DOUBLE_EQ(b.initial.at(k)[0], x[0] - 0.5 * x[1] * x[1]);
  }
  // lift at (0.5, 1.0) sits one y-period above (0.5, 0): apply the deck action
  const auto w = b.grid.wrap(32, 64);
  EXPECT_EQ(b.initial.at(w.node)[0] + static_cast<double>(w.deck[0]), 0.0);
}

TEST(Builtins, FlatConvergentZeroAmplitudeConvergesImmediately) {
  ScenarioConfig c = builtin_flat_convergent();
  c.initial.modes.clear();
  const BuiltScenario b = build_scenario(c);
  const FlowResult r = run_flow(b.grid, b.initial, b.flow);
  EXPECT_EQ(r.trace.outcome, Outcome::Converged);
  EXPECT_EQ(r.trace.steps, 0u);
}

TEST(Builtins, DirichletConstantBoundaryGivesConstantMap) {
  ScenarioConfig c = builtin_dirichlet_hyperbolic();
  c.domain.shape = {12, 12};
  c.initial.radius = {0.0, 0.0};
  c.initial.center = {0.0, 1.0};
  c.initial.value = {0.3, 1.7};
  c.flow.tol_residual = 1e-9;
  const BuiltScenario b = build_scenario(c);
  const FlowResult r = run_flow(b.grid, b.initial, b.flow);
  ASSERT_EQ(r.trace.outcome, Outcome::Converged);
  for (std::size_t k = 0; k < b.grid.node_count(); ++k) {
    EXPECT_NEAR(r.map.at(k)[0], 0.0, 1e-9);
    EXPECT_NEAR(r.map.at(k)[1], 1.0, 1e-9);
  }
}

TEST(Builtins, DirichletLimitIndependentOfMetricScale) {
  ScenarioConfig c = builtin_dirichlet_hyperbolic();
  c.domain.shape = {12, 12};
  c.metric = {MetricKind::ExplicitField, "identity"};
  c.flow.tol_residual = 1e-12;
  const BuiltScenario one = build_scenario(c);
  const FlowResult a = run_flow(one.grid, one.initial, one.flow);
  c.metric.name = "identity(2)";
  c.flow.tol_residual = 2e-12;
  const BuiltScenario two = build_scenario(c);
  const FlowResult b = run_flow(two.grid, two.initial, two.flow);
  ASSERT_EQ(a.trace.outcome, Outcome::Converged);
  ASSERT_EQ(b.trace.outcome, Outcome::Converged);
  EXPECT_NEAR(two.dt, 0.5 * one.dt, 1e-18);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.map.values.size(); ++i) diff = std::max(diff, std::abs(a.map.values[i] - b.map.values[i]));
  EXPECT_LE(diff, 1e-8);
}

TEST(Builtins, DirichletHyperbolicStaysInChartAndIsMonotone) {
  ScenarioConfig c = builtin_dirichlet_hyperbolic();
  c.domain.shape = {16, 16};
  const BuiltScenario b = build_scenario(c);
  double min_v = 1e300;
  const FlowResult r = run_flow(b.grid, b.initial, b.flow, [&](const FlowSample&, const MapField& f) {
    for (std::size_t k = 0; k < f.node_count(); ++k) min_v = std::min(min_v, f.at(k)[1]);
  });
  EXPECT_EQ(r.trace.outcome, Outcome::Converged);
  EXPECT_TRUE(r.trace.kinetic_monotone);
  EXPECT_GT(min_v, 0.9);
}

TEST(RunScenario, WritesOutputsAndIsReproducible) {
  const auto dir = std::filesystem::temp_directory_path() / "hessflow_test_run";
  std::filesystem::remove_all(dir);
  const ScenarioConfig c = parse(kSmall);
  const ScenarioReport first = run_scenario(c, dir / "a");
  const ScenarioReport second = run_scenario(c, dir / "b");
  EXPECT_TRUE(first.acceptable());
  EXPECT_EQ(first.trace_path, dir / "a" / "trace.csv");
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "final.snapshot"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "report.txt"));
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(first.trace_path), slurp(second.trace_path));
  EXPECT_EQ(slurp(first.snapshot_path), slurp(second.snapshot_path));
  std::ifstream trace(first.trace_path);
  EXPECT_EQ(read_trace_csv(trace).size() > 1, true);
  std::filesystem::remove_all(dir);
}
