#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessflow/potential.hpp"

namespace hessflow {

enum class Boundary { Periodic, Dirichlet };

std::string to_string(Boundary b);

struct GridSpec {
  std::size_t dim = 2;
  std::vector<std::size_t> shape;  // cells per axis, >= 4
  std::vector<double> spacing;     // h per axis; empty means 1 / shape
  Boundary boundary = Boundary::Periodic;
  /// Periodic 2-D grids only: deck group generated by
  /// (x, y) -> (x + shear * (n*y + n^2/2) + m*Lx, y + n*Ly) with Lx = Ly = 1.
  /// shear = 0 is the ordinary torus.
  int shear = 0;
};

/// Returns gamma^{ab} at a node given its coordinates.
using InverseMetricFn = std::function<Eigen::MatrixXd(std::span<const double> x)>;

/// Deck-group word: how many times each domain period generator was applied.
using DeckWord = std::array<long, 2>;

/// Node grid on the fundamental domain together with the sampled inverse metric.
///
/// Periodic grids have `shape[a]` nodes per axis at x = i*h; Dirichlet grids
/// have `shape[a] + 1` nodes including both boundary layers. Nodes are stored
/// row-major (last axis fastest).
class DomainGrid {
 public:
  DomainGrid(GridSpec spec, const InverseMetricFn& inverse_metric);

  std::size_t dim() const noexcept { return spec_.dim; }
  const GridSpec& spec() const noexcept { return spec_; }
  Boundary boundary() const noexcept { return spec_.boundary; }
  std::size_t cells(std::size_t axis) const { return spec_.shape[axis]; }
  double spacing(std::size_t axis) const { return spec_.spacing[axis]; }
  int shear() const noexcept { return spec_.shear; }

  std::size_t nodes_along(std::size_t axis) const { return counts_[axis]; }
  std::size_t node_count() const noexcept { return total_; }

  std::array<long, 2> index(std::size_t node) const;
  std::size_t node_at(long i, long j = 0) const;
  std::array<double, 2> coords(std::size_t node) const;

  bool is_boundary(std::size_t node) const;
  /// Nodes that evolve under the flow (all nodes when periodic).
  const std::vector<std::size_t>& active_nodes() const noexcept { return active_; }

  /// gamma^{ab} at a node, dim*dim row-major.
  std::span<const double> inverse_metric(std::size_t node) const {
    return {inv_metric_.data() + node * spec_.dim * spec_.dim, spec_.dim * spec_.dim};
  }

  double lambda_max() const noexcept { return lambda_max_; }
  double h_min() const noexcept { return h_min_; }
  /// safety * h_min^2 / (2 * dim * lambda_max).
  double cfl_bound(double safety) const;

  struct Wrapped {
    std::size_t node;
    DeckWord deck;  // value there = value at node + deck[0]*shift_0 + deck[1]*shift_1
  };
  /// Reduce an index to the fundamental domain. Periodic grids only.
  Wrapped wrap(long i, long j = 0) const;

 private:
  GridSpec spec_;
  std::array<std::size_t, 2> counts_{1, 1};
  std::size_t total_ = 0;
  std::vector<double> inv_metric_;
  std::vector<std::size_t> active_;
  double lambda_max_ = 0.0;
  double h_min_ = 0.0;
};

/// gamma^{ab} = identity.
InverseMetricFn identity_inverse_metric(std::size_t dim, double scale = 1.0);

/// gamma^{ab} = (Hess F)^{-1} sampled at the node coordinates.
InverseMetricFn inverse_metric_from_potential(PotentialPtr f);

/// Inverse of the invariant metric [[1, -y], [-y, y^2 + 1]] on the sheared torus:
/// [[y^2 + 1, y], [y, 1]].
InverseMetricFn sheared_torus_inverse_metric();

}  // namespace hessflow
