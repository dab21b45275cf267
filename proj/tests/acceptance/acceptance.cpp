// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hessflow/errors.hpp"
#include "hessflow/flow.hpp"
#include "hessflow/hessian_geometry.hpp"
#include "hessflow/io.hpp"
#include "hessflow/scenario.hpp"
#include "hessflow/target_chart.hpp"

using namespace hessflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
};

Vector random_vector(std::mt19937_64& rng, std::size_t n, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

PotentialPtr random_quadratic(std::mt19937_64& rng, std::size_t n) {
  const Matrix b = Matrix::NullaryExpr(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                       [&] { return std::normal_distribution<double>()(rng); });
  const Matrix a = b * b.transpose() + Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return std::make_shared<QuadraticPotential>(0.5 * (a + a.transpose()));
}

std::vector<PotentialPtr> potential_catalog(std::mt19937_64& rng) {
  return {random_quadratic(rng, 3), make_potential("sum_exp", 3), make_potential("log_sum_exp", 3)};
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Monotonicity tolerance computed from the trace samples themselves.
bool kinetic_nonincreasing(const std::vector<FlowSample>& s, double dt, double h, double* worst) {
  const double eps = 1e-6 * s.front().sup_kinetic + 10.0 * dt * h * h;
  *worst = 0.0;
  bool ok = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double rise = s[i].sup_kinetic - s[i - 1].sup_kinetic;
    *worst = std::max(*worst, rise);
    if (rise > eps) ok = false;
  }
  return ok;
}

double grid_h(const DomainGrid& g) { return g.h_min(); }

// ---------------------------------------------------------------- 1

Verdict connection_algebra() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> us(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& f : potential_catalog(rng)) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_vector(rng, f->dim(), 2.0);
      const double s = us(rng);
      worst = std::max(worst, s_connection(*f, x, 1.0).coeffs.max_abs());
      const auto p = s_connection(*f, x, s), m = s_connection(*f, x, -s), z = s_connection(*f, x, 0.0);
      worst = std::max({worst, p.coeffs.symmetry_defect(), m.coeffs.symmetry_defect()});
      for (std::size_t k = 0; k < p.coeffs.data().size(); ++k)
        worst = std::max(worst, std::abs(p.coeffs.data()[k] + m.coeffs.data()[k] - 2 * z.coeffs.data()[k]));
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3g (limit 1e-12)", worst)};
}

// ---------------------------------------------------------------- 2

Verdict duality_identity() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> us(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& f : potential_catalog(rng)) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_vector(rng, f->dim(), 2.0);
      worst = std::max(worst, duality_residual(*f, x, us(rng), random_vector(rng, f->dim(), 1.0),
                                               random_vector(rng, f->dim(), 1.0), random_vector(rng, f->dim(), 1.0)));
    }
  }
  return {worst <= 1e-9, fmt("max residual %.3g (limit 1e-9)", worst)};
}

// ---------------------------------------------------------------- 3

Verdict legendre_roundtrip() {
  std::mt19937_64 rng(103);
  double worst_identity = 0.0, worst_x = 0.0;
  for (const auto& f : potential_catalog(rng)) {
    for (int i = 0; i < 100; ++i) {
      // xi drawn through the gradient so it lies in the gradient image
      const Vector x_true = random_vector(rng, f->dim(), 2.0);
      const Vector xi = to_dual_coordinates(*f, x_true);
      const DualChart dc = legendre_dual(*f, xi);
      worst_identity = std::max(worst_identity, std::abs(f->eval(dc.x) + dc.phi - dc.x.dot(xi)));
      worst_x = std::max(worst_x, (dc.x - x_true).norm());
    }
  }
  return {worst_identity <= 1e-9 && worst_x <= 1e-8,
          fmt("max |F+Phi-x.xi| %.3g (limit 1e-9), max |x-x0| %.3g (limit 1e-8)", worst_identity, worst_x)};
}

// ---------------------------------------------------------------- 4 and 5 share the counterexample run

struct CounterexampleRun {
  int exit_code = -1;
  std::vector<FlowSample> samples;
  std::string report;
  double dt = 0.0;
  double h = 0.0;
};

CounterexampleRun run_counterexample_cli() {
  CounterexampleRun out;
  const auto dir = std::filesystem::temp_directory_path() / "hessflow_acceptance_counterexample";
  std::filesystem::remove_all(dir);
  std::ostringstream so, se;
  const std::vector<std::string> args{"run", "counterexample", "-o", dir.string()};
  out.exit_code = run_cli(args, so, se);
  std::ifstream trace(dir / "trace.csv");
  if (trace) out.samples = read_trace_csv(trace);
  std::ifstream report(dir / "report.txt");
  std::stringstream rs;
  rs << report.rdbuf();
  out.report = rs.str();
  const BuiltScenario b = build_scenario(builtin_counterexample());
  out.dt = b.dt;
  out.h = grid_h(b.grid);
  return out;
}

Verdict counterexample(const CounterexampleRun& run) {
  // short library run to t = 1 against the closed form x - y^2/2 - t
  ScenarioConfig cfg = builtin_counterexample();
  cfg.flow.t_end = 1.0;
  const BuiltScenario b = build_scenario(cfg);
  const FlowResult r = run_flow(b.grid, b.initial, b.flow);
  const double t = r.trace.samples.back().t;
  double err = 0.0;
  for (std::size_t k = 0; k < b.grid.node_count(); ++k) {
    const auto x = b.grid.coords(k);
    err = std::max(err, std::abs(r.map.at(k)[0] - (x[0] - 0.5 * x[1] * x[1] - t)));
  }

  double kin_dev = 0.0, dtilde_dev = 0.0;
  for (const auto& s : run.samples) {
    kin_dev = std::max(kin_dev, std::abs(s.sup_kinetic - 1.0));
    if (s.t >= 0.5 && s.t <= 2.0) dtilde_dev = std::max(dtilde_dev, std::abs(s.sup_dtilde - s.t) / s.t);
  }
  const bool diverged = run.report.find("outcome = Diverged") != std::string::npos;
  Verdict v;
  v.pass = run.exit_code == 0 && diverged && !run.samples.empty() && kin_dev <= 1e-6 && err <= 5e-3 &&
           std::abs(t - 1.0) < 1e-12 && dtilde_dev <= 0.02;
  v.detail = fmt("sup error at t=1 %.3g (limit 5e-3), max |kinetic-1| %.3g (limit 1e-6), ", err, kin_dev) +
             fmt("d~ within %.2g%% of t on [0.5,2], ", 100 * dtilde_dev) +
             "outcome " + (diverged ? "Diverged" : "not Diverged") + ", exit " + std::to_string(run.exit_code) +
             ", " + std::to_string(run.samples.size()) + " samples";
  return v;
}

Verdict kinetic_monotonicity(const CounterexampleRun& ce) {
  std::string detail;
  bool pass = true;
  auto record = [&](const std::string& name, bool ok, double worst) {
    pass = pass && ok;
    detail += name + fmt(" %.2g; ", worst);
  };

  double worst = 0.0;
  record("counterexample", !ce.samples.empty() && kinetic_nonincreasing(ce.samples, ce.dt, ce.h, &worst), worst);

  for (const auto& cfg : {builtin_flat_convergent(), builtin_dirichlet_hyperbolic()}) {
    const BuiltScenario b = build_scenario(cfg);
    const FlowResult r = run_flow(b.grid, b.initial, b.flow);
    const bool ok = kinetic_nonincreasing(r.trace.samples, b.dt, grid_h(b.grid), &worst) && r.trace.kinetic_monotone;
    record(cfg.name, ok, worst);
  }

  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> amp(-0.2, 0.2), ph(0.0, 2 * kPi), off(-0.3, 0.3);
  std::uniform_int_distribution<int> wave(-3, 3);
  for (int trial = 0; trial < 5; ++trial) {
    GridSpec spec;
    spec.dim = 2;
    spec.shape = {32, 32};
    const double a = 0.5 + std::abs(amp(rng)) * 5, c = 0.5 + std::abs(amp(rng)) * 5, bxy = off(rng) * std::sqrt(a * c);
    const DomainGrid g(spec, [=](std::span<const double>) {
      Eigen::MatrixXd m(2, 2);
      m << a, bxy, bxy, c;
      return m;
    });
    const ChartPtr chart = trial % 2 ? make_flat_torus({1.0, 2.0}) : make_euclidean(2);
    std::vector<std::array<double, 5>> modes;
    for (int m = 0; m < 4; ++m) modes.push_back({double(m % 2), double(wave(rng)), double(wave(rng)), amp(rng), ph(rng)});
    const auto mono = trial % 2 ? std::vector<std::vector<long>>{{1, 0}, {0, 1}} : std::vector<std::vector<long>>{};
    const MapField f0 = sample_map(g, chart, [&](std::span<const double> x, std::span<double> y) {
      y[0] = trial % 2 ? x[0] : 0.0;
      y[1] = trial % 2 ? 2.0 * x[1] : 0.0;
      for (const auto& m : modes)
        y[static_cast<std::size_t>(m[0])] += m[3] * std::sin(2 * kPi * (m[1] * x[0] + m[2] * x[1]) + m[4]);
    }, mono);
    FlowConfig cfg;
    cfg.t_end = 0.3;
    cfg.monitor_every = 5;
    const FlowResult r = run_flow(g, f0, cfg);
    record("random flow " + std::to_string(trial + 1),
           kinetic_nonincreasing(r.trace.samples, r.trace.dt, grid_h(g), &worst) && r.trace.kinetic_monotone, worst);
  }
  return {pass, "largest sample-to-sample rise: " + detail};
}

// ---------------------------------------------------------------- 6

double flat_convergent_error(std::size_t n) {
  ScenarioConfig cfg = builtin_flat_convergent();
  cfg.domain.shape = {n, n};
  cfg.flow.t_end = 0.5;
  cfg.flow.tol_residual = 1e-300;
  cfg.flow.monitor_every = 1000;
  const BuiltScenario b = build_scenario(cfg);
  const FlowResult r = run_flow(b.grid, b.initial, b.flow);

  // continuous solution: each mode of the lift decays at 4 pi^2 k^T gamma^{-1} k with gamma = A
  const PotentialPtr pot = make_potential(cfg.metric.name, 2);
  const Matrix ginv = pot->hess(Vector::Zero(2)).inverse();
  const double t = r.trace.samples.back().t;
  const auto& m = cfg.initial.modes;
  double err = 0.0;
  for (std::size_t k = 0; k < b.grid.node_count(); ++k) {
    const auto x = b.grid.coords(k);
    double exact = x[0];
    for (std::size_t i = 0; i < m.size(); i += 5) {
      Vector kv(2);
      kv << m[i + 1], m[i + 2];
      const double rate = 4 * kPi * kPi * kv.dot(ginv * kv);
      exact += m[i + 3] * std::exp(-rate * t) * std::sin(2 * kPi * (kv[0] * x[0] + kv[1] * x[1]) + m[i + 4]);
    }
    err = std::max(err, std::abs(r.map.at(k)[0] - exact));
  }
  return err;
}

Verdict fourier_oracle() {
  const double e64 = flat_convergent_error(64);
  const double e128 = flat_convergent_error(128);
  return {e64 <= 1e-3 && e64 / e128 >= 3.5,
          fmt("sup error %.3g at 64^2 (limit 1e-3), %.3g at 128^2, ratio %.2f (limit 3.5)", e64, e128, e64 / e128)};
}

// ---------------------------------------------------------------- 7

Verdict stencil_order() {
  // smooth periodic SPD gamma and smooth u with analytic second derivatives
  auto gamma = [](double x, double y) {
    return std::array<double, 3>{2.0 + 0.5 * std::sin(2 * kPi * x) * std::cos(2 * kPi * y),
                                 0.3 * std::sin(2 * kPi * (x + y)), 1.5 + 0.5 * std::cos(2 * kPi * x)};
  };
  auto u = [](double x, double y) { return std::sin(2 * kPi * x) * std::cos(4 * kPi * y) + 0.3 * std::sin(2 * kPi * (x + 2 * y)); };
  auto lu = [&](double x, double y) {
    const double w = 2 * kPi;
    const double uxx = -w * w * std::sin(w * x) * std::cos(2 * w * y) - 0.3 * w * w * std::sin(w * (x + 2 * y));
    const double uyy = -4 * w * w * std::sin(w * x) * std::cos(2 * w * y) - 1.2 * w * w * std::sin(w * (x + 2 * y));
    const double uxy = -2 * w * w * std::cos(w * x) * std::sin(2 * w * y) - 0.6 * w * w * std::sin(w * (x + 2 * y));
    const auto g = gamma(x, y);
    return g[0] * uxx + 2 * g[1] * uxy + g[2] * uyy;
  };
  std::vector<double> errors;
  for (std::size_t n : {32u, 64u, 128u}) {
    GridSpec spec;
    spec.dim = 2;
    spec.shape = {n, n};
    const DomainGrid g(spec, [&](std::span<const double> x) {
      const auto c = gamma(x[0], x[1]);
      Eigen::MatrixXd m(2, 2);
      m << c[0], c[1], c[1], c[2];
      return m;
    });
    std::vector<double> field(g.node_count());
    for (std::size_t k = 0; k < field.size(); ++k) field[k] = u(g.coords(k)[0], g.coords(k)[1]);
    const auto l = affine_laplacian(g, field);
    double err = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) err = std::max(err, std::abs(l[k] - lu(g.coords(k)[0], g.coords(k)[1])));
    errors.push_back(err);
  }
  const double o1 = std::log2(errors[0] / errors[1]), o2 = std::log2(errors[1] / errors[2]);
  return {std::min(o1, o2) >= 1.9, fmt("orders %.3f, %.3f (limit 1.9)", o1, o2)};
}

// ---------------------------------------------------------------- 8

Verdict dirichlet_convergence() {
  const BuiltScenario b = build_scenario(builtin_dirichlet_hyperbolic());
  double min_v = std::numeric_limits<double>::infinity();
  auto track = [&](const MapField& f) {
    for (std::size_t k = 0; k < f.node_count(); ++k) min_v = std::min(min_v, f.at(k)[1]);
  };
  track(b.initial);
  const FlowResult r = run_flow(b.grid, b.initial, b.flow, [&](const FlowSample&, const MapField& f) { track(f); });
  track(r.map);
  const double residual = r.trace.samples.back().sup_residual;
  return {r.trace.outcome == Outcome::Converged && residual <= 1e-6 && min_v > 0.0,
          fmt("final sup residual %.3g (limit 1e-6), min v %.4g over %g samples, outcome ", residual, min_v,
              static_cast<double>(r.trace.samples.size())) + to_string(r.trace.outcome)};
}

// ---------------------------------------------------------------- 9

Verdict target_certification() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(-3.0, 3.0), v(0.5, 4.0);
  std::normal_distribution<double> nd;
  const std::vector<ChartPtr> charts{make_euclidean(2), make_euclidean(3), make_flat_torus({1.0, 2.0}),
                                     make_hyperbolic_half_plane()};
  double flat_worst = 0.0, hyper_worst = 0.0;
  int samples = 0;
  for (const auto& chart : charts) {
    for (int i = 0; i < 25; ++i, ++samples) {
      std::vector<double> y(chart->dim()), a(chart->dim()), b(chart->dim());
      for (auto& c : y) c = u(rng);
      if (!chart->is_flat()) y[1] = v(rng);
      for (auto& c : a) c = nd(rng);
      for (auto& c : b) c = nd(rng);
      const double k = curvature_check_fd(*chart, y, a, b);
      if (chart->is_flat())
        flat_worst = std::max(flat_worst, std::abs(k));
      else
        hyper_worst = std::max(hyper_worst, std::abs(k + 1.0));
    }
  }
  return {flat_worst <= 1e-6 && hyper_worst <= 1e-4,
          fmt("flat max |K| %.3g (limit 1e-6), half-plane max |K+1| %.3g (limit 1e-4), %g samples", flat_worst,
              hyper_worst, samples)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Verdict()> run;
  };
  CounterexampleRun ce;
  const std::vector<Criterion> criteria{
      {1, "connection algebra", 1.0, connection_algebra},
      {2, "duality identity", 1.0, duality_identity},
      {3, "Legendre roundtrip", 5.0, legendre_roundtrip},
      {4, "counterexample reproduction", 120.0, [&] {
         ce = run_counterexample_cli();
         return counterexample(ce);
       }},
      {5, "kinetic monotonicity", 300.0, [&] { return kinetic_monotonicity(ce); }},
      {6, "flat-target Fourier oracle", 180.0, fourier_oracle},
      {7, "stencil order", 30.0, stencil_order},
      {8, "Dirichlet convergence", 180.0, dirichlet_convergence},
      {9, "target certification", 5.0, target_certification},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %d %s  %s: %s [%.2f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
