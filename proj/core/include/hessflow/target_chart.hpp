#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hessflow {

enum class CurvatureSign { Flat, Nonpositive, Negative };

std::string to_string(CurvatureSign sign);

/// Coordinate chart on the universal cover of a target manifold N.
///
/// Points are lifts; `monodromy()` lists the deck translations of the cover
/// (empty when N is simply connected). Christoffel symbols use the layout
/// gamma[(i * n + j) * n + k] = Gamma^i_{jk}.
class TargetChart {
 public:
  virtual ~TargetChart() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual CurvatureSign curvature_sign() const = 0;

  /// False outside the chart's valid region.
  virtual bool contains(std::span<const double> y) const = 0;

  /// Writes g_ij (n*n, row-major). Throws DomainViolation outside the chart.
  virtual void metric(std::span<const double> y, std::span<double> g) const = 0;

  /// Writes Gamma^i_{jk} (n^3). Throws DomainViolation outside the chart.
  virtual void christoffels(std::span<const double> y, std::span<double> gamma) const = 0;

  /// Distance in the universal cover between two lifts (no wrapping).
  virtual double distance(std::span<const double> a, std::span<const double> b) const = 0;

  const std::vector<std::vector<double>>& monodromy() const noexcept { return monodromy_; }

  bool is_flat() const { return curvature_sign() == CurvatureSign::Flat; }

  // Convenience wrappers returning owning values.
  Eigen::MatrixXd metric_at(std::span<const double> y) const;
  std::vector<double> christoffels_at(std::span<const double> y) const;

 protected:
  std::vector<std::vector<double>> monodromy_;
};

using ChartPtr = std::shared_ptr<const TargetChart>;

/// R^n with the Euclidean metric.
class EuclideanChart : public TargetChart {
 public:
  explicit EuclideanChart(std::size_t n);

  std::size_t dim() const override { return n_; }
  std::string name() const override;
  CurvatureSign curvature_sign() const override { return CurvatureSign::Flat; }
  bool contains(std::span<const double> y) const override;
  void metric(std::span<const double> y, std::span<double> g) const override;
  void christoffels(std::span<const double> y, std::span<double> gamma) const override;
  double distance(std::span<const double> a, std::span<const double> b) const override;

 protected:
  std::size_t n_;
};

/// R^n / (P_1 Z x ... x P_n Z); lifts live in R^n.
class FlatTorusChart final : public EuclideanChart {
 public:
  explicit FlatTorusChart(std::vector<double> periods);

  std::string name() const override;
  const std::vector<double>& periods() const noexcept { return periods_; }

 private:
  std::vector<double> periods_;
};

/// Poincare half-plane {(u, v) : v > 0} with g = (du^2 + dv^2) / v^2, K = -1.
class HyperbolicHalfPlaneChart final : public TargetChart {
 public:
  /// Any v at or below this is a DomainViolation.
  static constexpr double kMinHeight = 1e-12;

  HyperbolicHalfPlaneChart() = default;

  std::size_t dim() const override { return 2; }
  std::string name() const override { return "hyperbolic_half_plane"; }
  CurvatureSign curvature_sign() const override { return CurvatureSign::Negative; }
  bool contains(std::span<const double> y) const override;
  void metric(std::span<const double> y, std::span<double> g) const override;
  void christoffels(std::span<const double> y, std::span<double> gamma) const override;
  double distance(std::span<const double> a, std::span<const double> b) const override;
};

ChartPtr make_euclidean(std::size_t n);
ChartPtr make_flat_torus(std::vector<double> periods);
ChartPtr make_hyperbolic_half_plane();

/// Resolve "euclidean(n)", "flat_torus(p1, ...)", "circle", "hyperbolic_half_plane".
ChartPtr make_chart(const std::string& spec);

/// Sectional curvature of span{u, v} at y, from central differences of the
/// Christoffel symbols (step 1e-4 * (1 + |y|)). Test and certification utility.
double curvature_check_fd(const TargetChart& chart, std::span<const double> y,
                          std::span<const double> u, std::span<const double> v);

/// Homotopy distance between two consistently transported lifts.
double lift_delta(const TargetChart& chart, std::span<const double> a_lift,
                  std::span<const double> b_lift);

}  // namespace hessflow
