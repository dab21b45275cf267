#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hessflow/grid.hpp"
#include "hessflow/target_chart.hpp"

namespace hessflow {

/// Discretized map from the domain grid into a target chart, stored as a lift
/// on the fundamental domain plus equivariance data.
///
/// `monodromy[a][g]` is the integer multiplicity of chart deck generator g
/// picked up when crossing domain period a; the value at a node translated by
/// period a equals the stored value plus shift(a). These integers are fixed
/// when the map is created and the flow never changes them.
struct MapField {
  ChartPtr chart;
  std::vector<double> values;               // node-major, chart->dim() per node
  std::vector<std::vector<long>> monodromy;  // [domain axis][chart generator]

  std::size_t target_dim() const { return chart->dim(); }
  std::size_t node_count() const { return values.size() / chart->dim(); }

  std::span<const double> at(std::size_t node) const {
    return {values.data() + node * chart->dim(), chart->dim()};
  }
  std::span<double> at(std::size_t node) { return {values.data() + node * chart->dim(), chart->dim()}; }

  /// Cover translation for one domain period (zero vector if none).
  std::vector<double> shift(std::size_t axis) const;
};

using LiftFn = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Samples `lift` at every grid node. Throws DomainViolation if a value falls
/// outside the chart and ShapeMismatch if the monodromy table does not fit.
MapField sample_map(const DomainGrid& grid, ChartPtr chart, const LiftFn& lift,
                    std::vector<std::vector<long>> monodromy = {});

/// Structural checks shared by every flow entry point.
void validate_map(const DomainGrid& grid, const MapField& f);

}  // namespace hessflow
