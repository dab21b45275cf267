#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hessflow/flow.hpp"

namespace hessflow {

/// Plain-text snapshot: header `dim shape... spacing... chart_name`, then one
/// row per node `x_coords... f_lift_coords...` in row-major node order.
void write_snapshot(std::ostream& os, const DomainGrid& grid, const MapField& f);

struct Snapshot {
  std::size_t dim = 0;
  std::vector<std::size_t> shape;
  std::vector<double> spacing;
  std::string chart_name;
  std::vector<std::vector<double>> coords;
  std::vector<std::vector<double>> values;
};

/// Throws InvalidArgument on malformed input. `target_dim` is inferred from the chart name.
Snapshot read_snapshot(std::istream& is);

inline constexpr const char* kTraceHeader = "t,sup_kinetic,sup_eta,sup_dtilde,inf_dtilde,sup_residual";

void write_trace_csv(std::ostream& os, const FlowTrace& trace);
std::vector<FlowSample> read_trace_csv(std::istream& is);

}  // namespace hessflow
