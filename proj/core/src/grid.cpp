#include "hessflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hessflow/errors.hpp"
#include "hessflow/hessian_geometry.hpp"

namespace hessflow {

std::string to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "dirichlet"; }

DomainGrid::DomainGrid(GridSpec spec, const InverseMetricFn& inverse_metric) : spec_(std::move(spec)) {
  const std::size_t d = spec_.dim;
  if (d != 1 && d != 2) throw InvalidArgument("domain dimension must be 1 or 2");
  if (spec_.shape.size() != d) throw ShapeMismatch("domain shape needs one cell count per axis");
  if (spec_.spacing.empty())
    for (std::size_t n : spec_.shape) spec_.spacing.push_back(n ? 1.0 / static_cast<double>(n) : 0.0);
  if (spec_.spacing.size() != d) throw ShapeMismatch("domain spacing needs one value per axis");
  for (std::size_t a = 0; a < d; ++a) {
    if (spec_.shape[a] < 4) throw InvalidArgument("domain needs at least 4 cells per axis");
    if (!(spec_.spacing[a] > 0.0) || !std::isfinite(spec_.spacing[a]))
      throw InvalidArgument("domain spacing must be positive");
  }
  if (spec_.shear != 0) {
    if (d != 2 || spec_.boundary != Boundary::Periodic)
      throw InvalidArgument("sheared deck action needs a periodic 2-D domain");
    for (std::size_t a = 0; a < 2; ++a)
      if (std::abs(spec_.spacing[a] * static_cast<double>(spec_.shape[a]) - 1.0) > 1e-12)
        throw InvalidArgument("sheared deck action needs a unit fundamental domain");
    const long n0 = static_cast<long>(spec_.shape[0]);
    const long n1 = static_cast<long>(spec_.shape[1]);
    if (n0 % n1 != 0 || (spec_.shear * n0) % 2 != 0)
      throw InvalidArgument(
          "sheared deck action needs x cells to be a multiple of y cells and shear * x cells even");
  }

  for (std::size_t a = 0; a < d; ++a)
    counts_[a] = spec_.shape[a] + (spec_.boundary == Boundary::Dirichlet ? 1 : 0);
  total_ = counts_[0] * counts_[1];
  h_min_ = *std::min_element(spec_.spacing.begin(), spec_.spacing.end());

  inv_metric_.resize(total_ * d * d);
  for (std::size_t node = 0; node < total_; ++node) {
    const auto x = coords(node);
    const Eigen::MatrixXd m = inverse_metric(std::span<const double>(x.data(), d));
    if (m.rows() != static_cast<Eigen::Index>(d) || m.cols() != static_cast<Eigen::Index>(d))
      throw ShapeMismatch("inverse metric has the wrong size");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff() || !is_spd(m))
      throw NotPositiveDefinite("inverse metric is not symmetric positive definite at node " +
                                std::to_string(node));
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        inv_metric_[node * d * d + r * d + c] =
            0.5 * (m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +
                   m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    lambda_max_ = std::max(lambda_max_, eig.eigenvalues().maxCoeff());
    if (!is_boundary(node)) active_.push_back(node);
  }
}

std::array<long, 2> DomainGrid::index(std::size_t node) const {
  return {static_cast<long>(node / counts_[1]), static_cast<long>(node % counts_[1])};
}

std::size_t DomainGrid::node_at(long i, long j) const {
  return static_cast<std::size_t>(i) * counts_[1] + static_cast<std::size_t>(j);
}

std::array<double, 2> DomainGrid::coords(std::size_t node) const {
  const auto idx = index(node);
  std::array<double, 2> x{static_cast<double>(idx[0]) * spec_.spacing[0], 0.0};
  if (spec_.dim == 2) x[1] = static_cast<double>(idx[1]) * spec_.spacing[1];
  return x;
}

bool DomainGrid::is_boundary(std::size_t node) const {
  if (spec_.boundary == Boundary::Periodic) return false;
  const auto idx = index(node);
  for (std::size_t a = 0; a < spec_.dim; ++a)
    if (idx[a] == 0 || idx[a] == static_cast<long>(counts_[a]) - 1) return true;
  return false;
}

double DomainGrid::cfl_bound(double safety) const {
  return safety * h_min_ * h_min_ / (2.0 * static_cast<double>(spec_.dim) * lambda_max_);
}

DomainGrid::Wrapped DomainGrid::wrap(long i, long j) const {
  if (spec_.boundary != Boundary::Periodic) {
    if (i < 0 || j < 0 || i >= static_cast<long>(counts_[0]) || j >= static_cast<long>(counts_[1]))
      throw ShapeMismatch("index outside a Dirichlet grid");
    return {node_at(i, j), {0, 0}};
  }
  const long n0 = static_cast<long>(counts_[0]);
  const long n1 = static_cast<long>(counts_[1]);
  DeckWord w{0, 0};
  if (spec_.dim == 2) {
    const long s = spec_.shear;
    const long ratio = n0 / n1;
    // p = T_{0,+-1}(q): undo one y-crossing, shearing x by s * (y_q +- 1/2).
    while (j >= n1) {
      j -= n1;
      ++w[1];
      i -= s * j * ratio + (s * n0) / 2;
    }
    while (j < 0) {
      j += n1;
      --w[1];
      i += s * j * ratio - (s * n0) / 2;
    }
  }
  if (i >= n0 || i < 0) {
    const long q = (i >= 0) ? i / n0 : -((-i + n0 - 1) / n0);
    i -= q * n0;
    w[0] += q;
  }
  return {node_at(i, j), w};
}

InverseMetricFn identity_inverse_metric(std::size_t dim, double scale) {
  return [dim, scale](std::span<const double>) {
    return Eigen::MatrixXd(scale * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                                             static_cast<Eigen::Index>(dim)));
  };
}

InverseMetricFn inverse_metric_from_potential(PotentialPtr f) {
  return [f](std::span<const double> x) {
    Vector p(static_cast<Eigen::Index>(x.size()));
    for (std::size_t a = 0; a < x.size(); ++a) p[static_cast<Eigen::Index>(a)] = x[a];
    return dual_metric(*f, p);
  };
}

InverseMetricFn sheared_torus_inverse_metric() {
  return [](std::span<const double> x) {
    const double y = x[1];
    Eigen::MatrixXd m(2, 2);
    m << y * y + 1.0, y, y, 1.0;
    return m;
  };
}

}  // namespace hessflow
