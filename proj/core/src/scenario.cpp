#include "hessflow/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "hessflow/catalog.hpp"
#include "hessflow/io.hpp"
#include "hessflow/potential.hpp"

namespace hessflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    if constexpr (std::is_floating_point_v<T>)
      s += num(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "name", "expected_outcome", "output", "target",
      "domain.dim", "domain.shape", "domain.spacing", "domain.boundary", "domain.shear",
      "metric.source", "metric.potential", "metric.field",
      "initial.map", "initial.value", "initial.degree", "initial.offset", "initial.modes", "initial.center", "initial.radius",
      "flow.dt", "flow.t_end", "flow.scheme", "flow.tol_residual", "flow.cfl_safety", "flow.monitor_every",
      "flow.divergence_factor"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string str(const std::string& key) {
    const Entry& e = at(key);
    return e.value;
  }

  std::string str_or(const std::string& key, const std::string& fallback) {
    return has(key) ? str(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const Entry& e = at(key);
    std::string body = e.value;
    for (char& c : body)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream ss(body);
    std::vector<double> out;
    std::string token;
    while (ss >> token) {
      try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        out.push_back(v);
      } catch (const std::logic_error&) {
        throw ConfigError("line " + std::to_string(e.line) + ": '" + key + "' expects numbers, got '" +
                              token + "'",
                          key, e.line);
      }
    }
    return out;
  }

  double number(const std::string& key) {
    const auto v = numbers(key);
    if (v.size() != 1) fail(key, "expects a single number");
    return v[0];
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::vector<long> integers(const std::string& key) {
    std::vector<long> out;
    for (double v : numbers(key)) {
      if (v != std::floor(v)) fail(key, "expects integers");
      out.push_back(static_cast<long>(v));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) {
    const int line = has(key) ? entries_.at(key).line : 0;
    throw ConfigError((line ? "line " + std::to_string(line) + ": " : std::string()) + "'" + key +
                          "' " + why,
                      key, line);
  }

  void check_unused() const {
    for (const auto& [key, e] : entries_)
      if (!used_.count(key))
        throw ConfigError("line " + std::to_string(e.line) + ": '" + key + "' has no effect with this configuration",
                          key, e.line);
  }

 private:
  const Entry& at(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'", key, 0);
    used_.insert(key);
    return it->second;
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

Outcome parse_outcome(Reader& r, const std::string& key) {
  const std::string v = lower(r.str(key));
  if (v == "converged") return Outcome::Converged;
  if (v == "diverged") return Outcome::Diverged;
  if (v == "maxtimereached" || v == "max_time_reached") return Outcome::MaxTimeReached;
  r.fail(key, "must be Converged, Diverged or MaxTimeReached");
}

// Wraps library errors raised while resolving a field.
template <typename Fn>
auto resolve(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("'" + field + "': " + e.what(), field, 0);
  }
}

}  // namespace

// ---------------------------------------------------------------- parsing

ScenarioConfig parse_config(std::istream& is) {
  std::map<std::string, Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", "", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key", "", line_no);
    if (!known_keys().count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", key, line_no);
    if (value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'", key, line_no);
    if (entries.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", key, line_no);
    entries[key] = {value, line_no};
  }

  Reader r(std::move(entries));
  ScenarioConfig cfg;
  cfg.name = r.str("name");

  // domain
  for (long n : r.integers("domain.shape")) {
    if (n < 4) r.fail("domain.shape", "needs at least 4 cells per axis");
    cfg.domain.shape.push_back(static_cast<std::size_t>(n));
  }
  const double dim = r.number_or("domain.dim", static_cast<double>(cfg.domain.shape.size()));
  if (dim != 1.0 && dim != 2.0) r.fail("domain.dim", "must be 1 or 2");
  cfg.domain.dim = static_cast<std::size_t>(dim);
  if (cfg.domain.shape.size() != cfg.domain.dim) r.fail("domain.shape", "needs one entry per axis");
  if (r.has("domain.spacing")) {
    cfg.domain.spacing = r.numbers("domain.spacing");
    if (cfg.domain.spacing.size() != cfg.domain.dim) r.fail("domain.spacing", "needs one entry per axis");
  }
  const std::string boundary = lower(r.str_or("domain.boundary", "periodic"));
  if (boundary == "periodic")
    cfg.domain.boundary = Boundary::Periodic;
  else if (boundary == "dirichlet")
    cfg.domain.boundary = Boundary::Dirichlet;
  else
    r.fail("domain.boundary", "must be periodic or dirichlet");
  cfg.domain.shear = static_cast<int>(r.number_or("domain.shear", 0.0));

  // metric
  const std::string source = lower(r.str_or("metric.source", "field"));
  if (source == "potential") {
    cfg.metric.kind = MetricKind::FromPotential;
    cfg.metric.name = r.str("metric.potential");
  } else if (source == "field") {
    cfg.metric.kind = MetricKind::ExplicitField;
    cfg.metric.name = r.str_or("metric.field", "identity");
  } else {
    r.fail("metric.source", "must be potential or field");
  }

  cfg.target = r.str("target");

  // initial map
  cfg.initial.name = r.str("initial.map");
  if (r.has("initial.value")) cfg.initial.value = r.numbers("initial.value");
  if (r.has("initial.degree")) cfg.initial.degree = r.integers("initial.degree");
  if (r.has("initial.offset")) cfg.initial.offset = r.numbers("initial.offset");
  if (r.has("initial.modes")) cfg.initial.modes = r.numbers("initial.modes");
  if (r.has("initial.center")) cfg.initial.center = r.numbers("initial.center");
  if (r.has("initial.radius")) cfg.initial.radius = r.numbers("initial.radius");

  // flow
  const std::string dt = lower(r.str_or("flow.dt", "auto"));
  cfg.flow.dt = dt == "auto" ? 0.0 : r.number("flow.dt");
  cfg.flow.t_end = r.number("flow.t_end");
  const std::string scheme = lower(r.str_or("flow.scheme", "euler"));
  if (scheme == "euler" || scheme == "expliciteuler")
    cfg.flow.scheme = Scheme::ExplicitEuler;
  else if (scheme == "rk4")
    cfg.flow.scheme = Scheme::RK4;
  else
    r.fail("flow.scheme", "must be euler or rk4");
  cfg.flow.tol_residual = r.number_or("flow.tol_residual", cfg.flow.tol_residual);
  cfg.flow.cfl_safety = r.number_or("flow.cfl_safety", cfg.flow.cfl_safety);
  const double every = r.number_or("flow.monitor_every", static_cast<double>(cfg.flow.monitor_every));
  if (every < 1.0 || every != std::floor(every)) r.fail("flow.monitor_every", "must be a positive integer");
  cfg.flow.monitor_every = static_cast<std::size_t>(every);
  cfg.flow.divergence_factor = r.number_or("flow.divergence_factor", cfg.flow.divergence_factor);

  if (r.has("expected_outcome")) cfg.expected_outcome = parse_outcome(r, "expected_outcome");
  cfg.output = r.str_or("output", "out/" + cfg.name);
  r.check_unused();
  return cfg;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::string format_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "name = " << cfg.name << '\n';
  os << "expected_outcome = " << to_string(cfg.expected_outcome) << '\n';
  os << "output = " << cfg.output << "\n\n";
  os << "domain.dim = " << cfg.domain.dim << '\n';
  os << "domain.shape = " << join(cfg.domain.shape) << '\n';
  if (!cfg.domain.spacing.empty()) os << "domain.spacing = " << join(cfg.domain.spacing) << '\n';
  os << "domain.boundary = " << to_string(cfg.domain.boundary) << '\n';
  if (cfg.domain.shear != 0) os << "domain.shear = " << cfg.domain.shear << '\n';
  os << '\n';
  if (cfg.metric.kind == MetricKind::FromPotential)
    os << "metric.source = potential\nmetric.potential = " << cfg.metric.name << "\n\n";
  else
    os << "metric.source = field\nmetric.field = " << cfg.metric.name << "\n\n";
  os << "target = " << cfg.target << "\n\n";
  os << "initial.map = " << cfg.initial.name << '\n';
  if (!cfg.initial.value.empty()) os << "initial.value = " << join(cfg.initial.value) << '\n';
  if (!cfg.initial.degree.empty()) os << "initial.degree = " << join(cfg.initial.degree) << '\n';
  if (!cfg.initial.offset.empty()) os << "initial.offset = " << join(cfg.initial.offset) << '\n';
  if (!cfg.initial.modes.empty()) os << "initial.modes = " << join(cfg.initial.modes) << '\n';
  if (!cfg.initial.center.empty()) os << "initial.center = " << join(cfg.initial.center) << '\n';
  if (!cfg.initial.radius.empty()) os << "initial.radius = " << join(cfg.initial.radius) << '\n';
  os << '\n';
  os << "flow.dt = " << (cfg.flow.dt == 0.0 ? std::string("auto") : num(cfg.flow.dt)) << '\n';
  os << "flow.t_end = " << num(cfg.flow.t_end) << '\n';
  os << "flow.scheme = " << (cfg.flow.scheme == Scheme::RK4 ? "rk4" : "euler") << '\n';
  os << "flow.tol_residual = " << num(cfg.flow.tol_residual) << '\n';
  os << "flow.cfl_safety = " << num(cfg.flow.cfl_safety) << '\n';
  os << "flow.monitor_every = " << cfg.flow.monitor_every << '\n';
  os << "flow.divergence_factor = " << num(cfg.flow.divergence_factor) << '\n';
  return os.str();
}

// ---------------------------------------------------------------- builtins

ScenarioConfig builtin_counterexample() {
  ScenarioConfig cfg;
  cfg.name = "counterexample";
  cfg.domain.dim = 2;
  cfg.domain.shape = {64, 64};
  cfg.domain.boundary = Boundary::Periodic;
  cfg.domain.shear = 1;
  cfg.metric = {MetricKind::ExplicitField, "sheared_torus"};
  cfg.target = "circle";
  cfg.initial.name = "counterexample_lift";
  cfg.flow.t_end = 12.0;
  cfg.flow.tol_residual = 1e-8;
  cfg.flow.monitor_every = 200;
  cfg.expected_outcome = Outcome::Diverged;
  cfg.output = "out/counterexample";
  return cfg;
}

ScenarioConfig builtin_flat_convergent() {
  ScenarioConfig cfg;
  cfg.name = "flat_convergent";
  cfg.domain.dim = 2;
  cfg.domain.shape = {64, 64};
  cfg.domain.boundary = Boundary::Periodic;
  cfg.metric = {MetricKind::FromPotential, "quadratic(8,0,0,12)"};
  cfg.target = "circle";
  cfg.initial.name = "linear_modes";
  cfg.initial.degree = {1, 0};
  cfg.initial.offset = {0.0};
  // (component, k_x, k_y, amplitude, phase)
  cfg.initial.modes = {0, 1, 0, 0.1, 0.0, 0, 1, 1, 0.05, 0.3};
  cfg.flow.t_end = 10.0;
  cfg.flow.tol_residual = 1e-9;
  cfg.flow.monitor_every = 50;
  cfg.expected_outcome = Outcome::Converged;
  cfg.output = "out/flat_convergent";
  return cfg;
}

ScenarioConfig builtin_dirichlet_hyperbolic() {
  ScenarioConfig cfg;
  cfg.name = "dirichlet_hyperbolic";
  cfg.domain.dim = 2;
  cfg.domain.shape = {32, 32};
  cfg.domain.boundary = Boundary::Dirichlet;
  cfg.metric = {MetricKind::FromPotential, "sum_exp"};
  cfg.target = "hyperbolic_half_plane";
  cfg.initial.name = "boundary_loop";
  cfg.initial.center = {0.0, 1.5};
  cfg.initial.radius = {0.5, 0.5};
  cfg.initial.value = {0.0, 1.5};
  cfg.flow.t_end = 20.0;
  cfg.flow.tol_residual = 1e-7;
  cfg.flow.monitor_every = 20;
  cfg.expected_outcome = Outcome::Converged;
  cfg.output = "out/dirichlet_hyperbolic";
  return cfg;
}

std::vector<std::string> builtin_names() { return {"counterexample", "flat_convergent", "dirichlet_hyperbolic"}; }

std::optional<ScenarioConfig> find_builtin(const std::string& name) {
  if (name == "counterexample") return builtin_counterexample();
  if (name == "flat_convergent") return builtin_flat_convergent();
  if (name == "dirichlet_hyperbolic") return builtin_dirichlet_hyperbolic();
  return std::nullopt;
}

// ---------------------------------------------------------------- building

namespace {

InverseMetricFn resolve_metric(const ScenarioConfig& cfg) {
  const std::size_t d = cfg.domain.dim;
  if (cfg.metric.kind == MetricKind::FromPotential)
    return resolve("metric.potential",
                   [&] { return inverse_metric_from_potential(make_potential(cfg.metric.name, d)); });
  return resolve("metric.field", [&]() -> InverseMetricFn {
    const CatalogRef ref = parse_catalog_ref(cfg.metric.name);
    if (ref.name == "identity") {
      if (ref.args.size() > 1) throw InvalidArgument("identity takes at most one scale");
      const double scale = ref.args.empty() ? 1.0 : ref.args[0];
      if (!(scale > 0.0)) throw InvalidArgument("identity scale must be positive");
      return identity_inverse_metric(d, scale);
    }
    if (ref.name == "sheared_torus") {
      if (d != 2) throw InvalidArgument("sheared_torus metric needs a 2-D domain");
      return sheared_torus_inverse_metric();
    }
    throw InvalidArgument("unknown metric field '" + ref.name + "'");
  });
}

MapField resolve_initial(const ScenarioConfig& cfg, const DomainGrid& grid, const ChartPtr& chart) {
  const InitialMapSpec& init = cfg.initial;
  const std::size_t n = chart->dim();
  const std::size_t d = grid.dim();
  const std::size_t gens = chart->monodromy().size();
  const bool periodic = grid.boundary() == Boundary::Periodic;
  auto zero_monodromy = [&] {
    return periodic ? std::vector<std::vector<long>>(d, std::vector<long>(gens, 0))
                    : std::vector<std::vector<long>>{};
  };
  auto need = [&](const std::vector<double>& v, std::size_t size, const char* key) {
    if (v.size() != size)
      throw ConfigError(std::string("'") + key + "' needs " + std::to_string(size) + " values", key, 0);
  };
  auto sample = [&](const LiftFn& lift, std::vector<std::vector<long>> mono) {
    return resolve("initial.map", [&] { return sample_map(grid, chart, lift, std::move(mono)); });
  };

  if (init.name == "constant") {
    need(init.value, n, "initial.value");
    return sample([&](std::span<const double>, std::span<double> y) {
      std::copy(init.value.begin(), init.value.end(), y.begin());
    }, zero_monodromy());
  }

  if (init.name == "counterexample_lift") {
    if (!periodic || d != 2 || grid.shear() == 0)
      throw ConfigError("'initial.map': counterexample_lift needs a sheared periodic 2-D domain",
                        "initial.map", 0);
    const auto* torus = dynamic_cast<const FlatTorusChart*>(chart.get());
    if (!torus || n != 1)
      throw ConfigError("'initial.map': counterexample_lift needs a circle target", "initial.map", 0);
    const double period = torus->periods()[0];
    const double s = grid.shear();
    // x - (s/2) y^2 is equivariant for the homomorphism (m, n) -> m.
    return sample([period, s](std::span<const double> x, std::span<double> y) {
      y[0] = period * (x[0] - 0.5 * s * x[1] * x[1]);
    }, {{1}, {0}});
  }

  if (init.name == "linear_modes") {
    if (grid.shear() != 0)
      throw ConfigError("'initial.map': linear_modes is not equivariant on a sheared domain",
                        "initial.map", 0);
    std::vector<long> degree = init.degree;
    if (degree.empty()) degree.assign(n * d, 0);
    if (degree.size() != n * d)
      throw ConfigError("'initial.degree' needs target_dim * domain_dim integers", "initial.degree", 0);
    std::vector<double> offset = init.offset;
    if (offset.empty()) offset.assign(n, 0.0);
    need(offset, n, "initial.offset");
    const std::size_t group = d + 3;
    if (init.modes.size() % group != 0)
      throw ConfigError("'initial.modes' needs groups of (component, k_1..k_d, amplitude, phase)",
                        "initial.modes", 0);
    for (std::size_t m = 0; m < init.modes.size(); m += group)
      if (init.modes[m] < 0 || init.modes[m] >= static_cast<double>(n) ||
          init.modes[m] != std::floor(init.modes[m]))
        throw ConfigError("'initial.modes' has an invalid component index", "initial.modes", 0);

    const auto* torus = dynamic_cast<const FlatTorusChart*>(chart.get());
    const bool any_degree = std::any_of(degree.begin(), degree.end(), [](long k) { return k != 0; });
    if (any_degree && !torus)
      throw ConfigError("'initial.degree' needs a flat torus target", "initial.degree", 0);
    std::vector<double> extent(d);
    for (std::size_t a = 0; a < d; ++a) extent[a] = grid.spacing(a) * static_cast<double>(grid.cells(a));

    std::vector<std::vector<long>> mono = zero_monodromy();
    if (periodic && torus)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t i = 0; i < n; ++i) mono[a][i] = degree[i * d + a];
    const std::vector<double> modes = init.modes;
    return sample([=](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < n; ++i) {
        double v = offset[i];
        if (torus)
          for (std::size_t a = 0; a < d; ++a)
            v += static_cast<double>(degree[i * d + a]) * torus->periods()[i] * x[a] / extent[a];
        y[i] = v;
      }
      for (std::size_t m = 0; m < modes.size(); m += group) {
        double phase = modes[m + d + 2];
        for (std::size_t a = 0; a < d; ++a) phase += 2.0 * std::numbers::pi * modes[m + 1 + a] * x[a] / extent[a];
        y[static_cast<std::size_t>(modes[m])] += modes[m + d + 1] * std::sin(phase);
      }
    }, mono);
  }

  if (init.name == "boundary_loop") {
    if (periodic) throw ConfigError("'initial.map': boundary_loop needs a Dirichlet domain", "initial.map", 0);
    if (n != 2) throw ConfigError("'initial.map': boundary_loop needs a 2-D target", "initial.map", 0);
    need(init.center, 2, "initial.center");
    need(init.radius, 2, "initial.radius");
    need(init.value, 2, "initial.value");
    std::array<double, 2> mid{0.5 * grid.spacing(0) * static_cast<double>(grid.cells(0)), 0.0};
    if (d == 2) mid[1] = 0.5 * grid.spacing(1) * static_cast<double>(grid.cells(1));
    // The loop is parametrized by the polar angle of the boundary node about the domain centre.
    MapField f = sample([&](std::span<const double>, std::span<double> y) {
      y[0] = init.value[0];
      y[1] = init.value[1];
    }, {});
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
      if (!grid.is_boundary(node)) continue;
      const auto x = grid.coords(node);
      const double theta = std::atan2(d == 2 ? x[1] - mid[1] : 0.0, x[0] - mid[0]);
      f.at(node)[0] = init.center[0] + init.radius[0] * std::cos(theta);
      f.at(node)[1] = init.center[1] + init.radius[1] * std::sin(theta);
    }
    resolve("initial.map", [&] {
      validate_map(grid, f);
      return 0;
    });
    return f;
  }

  throw ConfigError("'initial.map': unknown initial map '" + init.name + "'", "initial.map", 0);
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& cfg) {
  if (cfg.name.empty()) throw ConfigError("missing required key 'name'", "name", 0);
  DomainGrid grid = resolve("domain", [&] { return DomainGrid(cfg.domain, resolve_metric(cfg)); });
  const ChartPtr chart = resolve("target", [&] { return make_chart(cfg.target); });
  MapField initial = resolve_initial(cfg, grid, chart);
  const double dt = resolve("flow.dt", [&] { return resolve_time_step(grid, cfg.flow); });
  return {std::move(grid), std::move(initial), cfg.flow, dt};
}

// ---------------------------------------------------------------- running

void write_report(std::ostream& os, const ScenarioReport& r) {
  os << "name = " << r.name << '\n'
     << "outcome = " << to_string(r.outcome) << '\n'
     << "expected_outcome = " << to_string(r.expected) << '\n'
     << "acceptable = " << (r.acceptable() ? "true" : "false") << '\n'
     << "final_sup_residual = " << num(r.final_residual) << '\n'
     << "final_sup_kinetic = " << num(r.final_kinetic) << '\n'
     << "kinetic_monotone = " << (r.kinetic_monotone ? "true" : "false") << '\n'
     << "steps = " << r.steps << '\n'
     << "dt = " << num(r.dt) << '\n'
     << "trace = " << r.trace_path.string() << '\n'
     << "snapshot = " << r.snapshot_path.string() << '\n'
     << "wall_seconds = " << num(r.wall_seconds) << '\n';
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& output_dir) {
  const auto start = std::chrono::steady_clock::now();
  BuiltScenario built = build_scenario(cfg);
  std::filesystem::create_directories(output_dir);

  ScenarioReport report;
  report.name = cfg.name;
  report.expected = cfg.expected_outcome;
  report.trace_path = output_dir / "trace.csv";
  report.snapshot_path = output_dir / "final.snapshot";

  FlowResult result;
  try {
    result = run_flow(built.grid, built.initial, built.flow);
  } catch (const FlowChartExit& e) {
    std::ofstream trace_out(report.trace_path);
    write_trace_csv(trace_out, e.trace());
    throw;
  }

  {
    std::ofstream trace_out(report.trace_path);
    write_trace_csv(trace_out, result.trace);
    std::ofstream snap_out(report.snapshot_path);
    write_snapshot(snap_out, built.grid, result.map);
  }
  report.outcome = result.trace.outcome;
  report.final_residual = result.trace.samples.back().sup_residual;
  report.final_kinetic = result.trace.samples.back().sup_kinetic;
  report.kinetic_monotone = result.trace.kinetic_monotone;
  report.steps = result.trace.steps;
  report.dt = result.trace.dt;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream report_out(output_dir / "report.txt");
  write_report(report_out, report);
  return report;
}

}  // namespace hessflow
