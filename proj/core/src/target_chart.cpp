#include "hessflow/target_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hessflow/catalog.hpp"
#include "hessflow/errors.hpp"

namespace hessflow {

std::string to_string(CurvatureSign sign) {
  switch (sign) {
    case CurvatureSign::Flat: return "Flat";
    case CurvatureSign::Nonpositive: return "Nonpositive";
    case CurvatureSign::Negative: return "Negative";
  }
  return "?";
}

Eigen::MatrixXd TargetChart::metric_at(std::span<const double> y) const {
  const auto n = dim();
  std::vector<double> g(n * n);
  metric(y, g);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[i * n + j];
  return m;
}

std::vector<double> TargetChart::christoffels_at(std::span<const double> y) const {
  std::vector<double> gamma(dim() * dim() * dim());
  christoffels(y, gamma);
  return gamma;
}

namespace {

std::string who_name(const char* s) { return s; }
std::string who_name(const TargetChart* c) { return c->name(); }

template <typename Who>
void check_size(std::span<const double> y, std::size_t n, const Who& who) {
  if (y.size() != n)
    throw ShapeMismatch(std::string(who_name(who)) + ": point has dimension " + std::to_string(y.size()) +
                        ", chart has dimension " + std::to_string(n));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- euclidean

EuclideanChart::EuclideanChart(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("euclidean chart needs dimension >= 1");
}

std::string EuclideanChart::name() const { return "euclidean(" + std::to_string(n_) + ")"; }

bool EuclideanChart::contains(std::span<const double> y) const {
  return y.size() == n_ && std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

void EuclideanChart::metric(std::span<const double> y, std::span<double> g) const {
  check_size(y, n_, static_cast<const TargetChart*>(this));
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) g[i * n_ + i] = 1.0;
}

void EuclideanChart::christoffels(std::span<const double> y, std::span<double> gamma) const {
  check_size(y, n_, static_cast<const TargetChart*>(this));
  std::fill(gamma.begin(), gamma.end(), 0.0);
}

double EuclideanChart::distance(std::span<const double> a, std::span<const double> b) const {
  check_size(a, n_, static_cast<const TargetChart*>(this));
  check_size(b, n_, static_cast<const TargetChart*>(this));
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

// ---------------------------------------------------------------- flat torus

FlatTorusChart::FlatTorusChart(std::vector<double> periods)
    : EuclideanChart(periods.size()), periods_(std::move(periods)) {
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (!(periods_[i] > 0.0)) throw InvalidArgument("flat torus periods must be positive");
    std::vector<double> generator(periods_.size(), 0.0);
    generator[i] = periods_[i];
    monodromy_.push_back(std::move(generator));
  }
}

std::string FlatTorusChart::name() const {
  if (periods_.size() == 1 && periods_[0] == 1.0) return "circle";
  std::string s = "flat_torus(";
  for (std::size_t i = 0; i < periods_.size(); ++i) s += (i ? "," : "") + format_number(periods_[i]);
  return s + ")";
}

// ---------------------------------------------------------------- half-plane

namespace {

void check_half_plane(std::span<const double> y) {
  check_size(y, 2, "hyperbolic_half_plane");
  if (!(y[1] > HyperbolicHalfPlaneChart::kMinHeight) || !std::isfinite(y[0]) || !std::isfinite(y[1]))
    throw DomainViolation("hyperbolic_half_plane: point (" + format_number(y[0]) + ", " +
                          format_number(y[1]) + ") is outside v > 0");
}

}  // namespace

bool HyperbolicHalfPlaneChart::contains(std::span<const double> y) const {
  return y.size() == 2 && std::isfinite(y[0]) && std::isfinite(y[1]) && y[1] > kMinHeight;
}

void HyperbolicHalfPlaneChart::metric(std::span<const double> y, std::span<double> g) const {
  check_half_plane(y);
  const double w = 1.0 / (y[1] * y[1]);
  g[0] = w;
  g[1] = 0.0;
  g[2] = 0.0;
  g[3] = w;
}

void HyperbolicHalfPlaneChart::christoffels(std::span<const double> y, std::span<double> gamma) const {
  check_half_plane(y);
  const double inv = 1.0 / y[1];
  // index (i * 2 + j) * 2 + k, coordinates (u, v) = (0, 1)
  gamma[0] = 0.0;    // u uu
  gamma[1] = -inv;   // u uv
  gamma[2] = -inv;   // u vu
  gamma[3] = 0.0;    // u vv
  gamma[4] = inv;    // v uu
  gamma[5] = 0.0;    // v uv
  gamma[6] = 0.0;    // v vu
  gamma[7] = -inv;   // v vv
}

double HyperbolicHalfPlaneChart::distance(std::span<const double> a, std::span<const double> b) const {
  check_half_plane(a);
  check_half_plane(b);
  const double du = a[0] - b[0];
  const double dv = a[1] - b[1];
  // 2 asinh(|a-b| / (2 sqrt(a_v b_v))) == arccosh(1 + |a-b|^2 / (2 a_v b_v)), stable near 0.
  return 2.0 * std::asinh(std::sqrt(du * du + dv * dv) / (2.0 * std::sqrt(a[1] * b[1])));
}

// ---------------------------------------------------------------- factories

ChartPtr make_euclidean(std::size_t n) { return std::make_shared<EuclideanChart>(n); }

ChartPtr make_flat_torus(std::vector<double> periods) {
  if (periods.empty()) throw InvalidArgument("flat torus needs at least one period");
  return std::make_shared<FlatTorusChart>(std::move(periods));
}

ChartPtr make_hyperbolic_half_plane() { return std::make_shared<HyperbolicHalfPlaneChart>(); }

ChartPtr make_chart(const std::string& spec) {
  const CatalogRef ref = parse_catalog_ref(spec);
  if (ref.name == "euclidean") {
    if (ref.args.size() != 1 || ref.args[0] < 1 || ref.args[0] != std::floor(ref.args[0]))
      throw InvalidArgument("euclidean(n) needs one positive integer");
    return make_euclidean(static_cast<std::size_t>(ref.args[0]));
  }
  if (ref.name == "flat_torus") return make_flat_torus(ref.args);
  if (ref.name == "circle") {
    if (!ref.args.empty()) throw InvalidArgument("circle takes no parameters");
    return make_flat_torus({1.0});
  }
  if (ref.name == "hyperbolic_half_plane") {
    if (!ref.args.empty()) throw InvalidArgument("hyperbolic_half_plane takes no parameters");
    return make_hyperbolic_half_plane();
  }
  throw InvalidArgument("unknown target chart '" + ref.name + "'");
}

// ---------------------------------------------------------------- curvature

double curvature_check_fd(const TargetChart& chart, std::span<const double> y,
                          std::span<const double> u, std::span<const double> v) {
  const std::size_t n = chart.dim();
  check_size(y, n, &chart);
  check_size(u, n, "curvature_check_fd (u)");
  check_size(v, n, "curvature_check_fd (v)");
  if (n < 2) throw DegeneratePlane("curvature_check_fd: chart of dimension 1 has no 2-planes");

  const std::vector<double> g = [&] {
    std::vector<double> out(n * n);
    chart.metric(y, out);
    return out;
  }();
  auto inner = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * a[i] * b[j];
    return s;
  };
  const double uu = inner(u, u), vv = inner(v, v), uv = inner(u, v);
  const double area = uu * vv - uv * uv;
  if (!(area > 1e-12 * uu * vv)) throw DegeneratePlane("curvature_check_fd: u and v are linearly dependent");

  double norm = 0.0;
  for (double c : y) norm += c * c;
  const double h = 1e-4 * (1.0 + std::sqrt(norm));

  const std::size_t n3 = n * n * n;
  const std::vector<double> gamma = chart.christoffels_at(y);
  // dgamma[m * n3 + idx] = d_m Gamma[idx]
  std::vector<double> dgamma(n * n3);
  std::vector<double> yp(y.begin(), y.end()), ym(y.begin(), y.end());
  std::vector<double> gp(n3), gm(n3);
  for (std::size_t m = 0; m < n; ++m) {
    yp[m] = y[m] + h;
    ym[m] = y[m] - h;
    chart.christoffels(yp, gp);
    chart.christoffels(ym, gm);
    for (std::size_t idx = 0; idx < n3; ++idx) dgamma[m * n3 + idx] = (gp[idx] - gm[idx]) / (2.0 * h);
    yp[m] = y[m];
    ym[m] = y[m];
  }
  auto G = [&](std::size_t i, std::size_t j, std::size_t k) { return gamma[(i * n + j) * n + k]; };
  auto dG = [&](std::size_t m, std::size_t i, std::size_t j, std::size_t k) {
    return dgamma[m * n3 + (i * n + j) * n + k];
  };

  // R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj};
  // numerator = g(R(u, v) v, u).
  std::vector<double> rvec(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double r = dG(k, i, l, j) - dG(l, i, k, j);
          for (std::size_t m = 0; m < n; ++m) r += G(i, k, m) * G(m, l, j) - G(i, l, m) * G(m, k, j);
          acc += r * v[j] * u[k] * v[l];
        }
    rvec[i] = acc;
  }
  return inner(rvec, u) / area;
}

double lift_delta(const TargetChart& chart, std::span<const double> a_lift,
                  std::span<const double> b_lift) {
  return chart.distance(a_lift, b_lift);
}

}  // namespace hessflow
