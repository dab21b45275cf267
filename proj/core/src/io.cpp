#include "hessflow/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace hessflow {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_numbers(const std::string& line, char sep) {
  std::vector<double> out;
  std::string token;
  std::istringstream ss(line);
  if (sep == ' ') {
    while (ss >> token) {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw InvalidArgument("bad number '" + token + "'");
    }
  } else {
    while (std::getline(ss, token, sep)) {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw InvalidArgument("bad number '" + token + "'");
    }
  }
  return out;
}

}  // namespace

void write_snapshot(std::ostream& os, const DomainGrid& grid, const MapField& f) {
  validate_map(grid, f);
  const std::size_t d = grid.dim();
  os << d;
  for (std::size_t a = 0; a < d; ++a) os << ' ' << grid.cells(a);
  for (std::size_t a = 0; a < d; ++a) os << ' ' << num(grid.spacing(a));
  os << ' ' << f.chart->name() << '\n';
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.coords(node);
    for (std::size_t a = 0; a < d; ++a) os << (a ? " " : "") << num(x[a]);
    for (double v : f.at(node)) os << ' ' << num(v);
    os << '\n';
  }
}

Snapshot read_snapshot(std::istream& is) {
  Snapshot snap;
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument("snapshot: missing header");
  std::istringstream hs(header);
  if (!(hs >> snap.dim) || snap.dim < 1 || snap.dim > 2) throw InvalidArgument("snapshot: bad dimension");
  snap.shape.resize(snap.dim);
  snap.spacing.resize(snap.dim);
  for (auto& s : snap.shape)
    if (!(hs >> s)) throw InvalidArgument("snapshot: bad shape");
  for (auto& h : snap.spacing)
    if (!(hs >> h)) throw InvalidArgument("snapshot: bad spacing");
  if (!(hs >> snap.chart_name)) throw InvalidArgument("snapshot: missing chart name");

  std::string line;
  std::size_t width = 0;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const std::vector<double> row = parse_numbers(line, ' ');
      if (width == 0) width = row.size();
      if (row.size() != width || width <= snap.dim) throw InvalidArgument("snapshot: ragged row");
      snap.coords.emplace_back(row.begin(), row.begin() + static_cast<long>(snap.dim));
      snap.values.emplace_back(row.begin() + static_cast<long>(snap.dim), row.end());
    }
  } catch (const std::logic_error& e) {
    throw InvalidArgument(std::string("snapshot: ") + e.what());
  }
  // periodic grids store N nodes per axis, Dirichlet grids N + 1
  std::size_t periodic = 1, dirichlet = 1;
  for (std::size_t n : snap.shape) {
    periodic *= n;
    dirichlet *= n + 1;
  }
  if (snap.values.size() != periodic && snap.values.size() != dirichlet)
    throw InvalidArgument("snapshot: " + std::to_string(snap.values.size()) + " rows do not match the shape");
  return snap;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
  os << kTraceHeader << '\n';
  for (const FlowSample& s : trace.samples)
    os << num(s.t) << ',' << num(s.sup_kinetic) << ',' << num(s.sup_eta) << ',' << num(s.sup_dtilde)
       << ',' << num(s.inf_dtilde) << ',' << num(s.sup_residual) << '\n';
}

std::vector<FlowSample> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw InvalidArgument("trace: bad header");
  std::vector<FlowSample> out;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto v = parse_numbers(line, ',');
      if (v.size() != 6) throw InvalidArgument("trace: expected 6 columns");
      out.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
  } catch (const std::logic_error& e) {
    throw InvalidArgument(std::string("trace: ") + e.what());
  }
  return out;
}

}  // namespace hessflow
