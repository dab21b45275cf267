#include "hessflow/map_field.hpp"

#include "hessflow/errors.hpp"

namespace hessflow {

std::vector<double> MapField::shift(std::size_t axis) const {
  std::vector<double> out(chart->dim(), 0.0);
  if (axis >= monodromy.size()) return out;
  const auto& gens = chart->monodromy();
  for (std::size_t g = 0; g < monodromy[axis].size(); ++g)
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += static_cast<double>(monodromy[axis][g]) * gens[g][i];
  return out;
}

void validate_map(const DomainGrid& grid, const MapField& f) {
  if (!f.chart) throw InvalidArgument("map has no target chart");
  const std::size_t n = f.chart->dim();
  if (f.values.size() != grid.node_count() * n)
    throw ShapeMismatch("map has " + std::to_string(f.values.size()) + " values, grid needs " +
                        std::to_string(grid.node_count() * n));
  if (!f.monodromy.empty()) {
    if (f.monodromy.size() != grid.dim())
      throw ShapeMismatch("monodromy needs one row per domain period");
    for (const auto& row : f.monodromy)
      if (row.size() != f.chart->monodromy().size())
        throw ShapeMismatch("monodromy row must have one entry per chart deck generator");
  }
  for (std::size_t node = 0; node < grid.node_count(); ++node)
    if (!f.chart->contains(f.at(node)))
      throw DomainViolation("map value at node " + std::to_string(node) + " lies outside " +
                            f.chart->name());
}

MapField sample_map(const DomainGrid& grid, ChartPtr chart, const LiftFn& lift,
                    std::vector<std::vector<long>> monodromy) {
  MapField f;
  f.chart = std::move(chart);
  f.monodromy = std::move(monodromy);
  const std::size_t n = f.chart->dim();
  f.values.assign(grid.node_count() * n, 0.0);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.coords(node);
    lift(std::span<const double>(x.data(), grid.dim()), f.at(node));
  }
  validate_map(grid, f);
  return f;
}

}  // namespace hessflow
