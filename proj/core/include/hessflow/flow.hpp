#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hessflow/errors.hpp"
#include "hessflow/grid.hpp"
#include "hessflow/map_field.hpp"

namespace hessflow {

enum class Scheme { ExplicitEuler, RK4 };
enum class Outcome { Converged, Diverged, MaxTimeReached };

std::string to_string(Scheme s);
std::string to_string(Outcome o);

struct FlowConfig {
  /// 0 selects the largest step allowed by the CFL bound.
  double dt = 0.0;
  double t_end = 1.0;
  Scheme scheme = Scheme::ExplicitEuler;
  double tol_residual = 1e-8;
  double cfl_safety = 0.5;
  std::size_t monitor_every = 10;
  /// Diverged once sup d~ > divergence_factor * (initial sup d~ + 1).
  double divergence_factor = 10.0;
  /// Worker threads for the per-node update; 0 = hardware concurrency.
  unsigned threads = 1;
};

/// Checks the FlowConfig invariants against the grid and returns the step to
/// use. Throws CflViolation (message names the bound) or InvalidArgument.
double resolve_time_step(const DomainGrid& grid, const FlowConfig& cfg);

struct FlowSample {
  double t = 0.0;
  double sup_kinetic = 0.0;
  double sup_eta = 0.0;
  double sup_dtilde = 0.0;
  double inf_dtilde = 0.0;
  double sup_residual = 0.0;
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  Outcome outcome = Outcome::MaxTimeReached;
  double dt = 0.0;
  std::size_t steps = 0;
  /// Discrete monotonicity of sup_kinetic between consecutive samples.
  bool kinetic_monotone = true;
  double kinetic_max_increase = 0.0;
  double kinetic_tolerance = 0.0;
};

/// ChartExit raised from run_flow; carries the trace up to the failure.
class FlowChartExit : public ChartExit {
 public:
  FlowChartExit(const ChartExit& cause, FlowTrace trace)
      : ChartExit(cause.what(), cause.node(), cause.time()), trace_(std::move(trace)) {}
  const FlowTrace& trace() const noexcept { return trace_; }

 private:
  FlowTrace trace_;
};

/// gamma^{ab} D^2_{ab} u at every node; zero on Dirichlet boundary nodes.
/// `period_shifts[a]` is added to u when crossing domain period a (empty: periodic u).
std::vector<double> affine_laplacian(const DomainGrid& grid, std::span<const double> u,
                                     std::span<const double> period_shifts = {});

/// sigma^i = gamma^{ab} (D^2_{ab} f^i + Gamma^i_{jk}(f) D_a f^j D_b f^k), node-major.
/// Zero on Dirichlet boundary nodes.
std::vector<double> tension_field(const DomainGrid& grid, const MapField& f);

/// One time step of df/dt = sigma(f). Monodromy is carried over unchanged.
MapField flow_step(const DomainGrid& grid, const MapField& f, const FlowConfig& cfg);

/// sup_x g_ij(f_next) fdot^i fdot^j with fdot = (f_next - f_prev) / dt.
double monitor_kinetic(const DomainGrid& grid, const MapField& f_prev, const MapField& f_next,
                       double dt);

/// sup_x gamma^{ab} g_ij(f) D_a f^i D_b f^j over nodes with a full stencil.
double monitor_eta(const DomainGrid& grid, const MapField& f);

struct HomotopyDistance {
  double sup = 0.0;
  double inf = 0.0;
};

/// sup/inf over nodes of the cover distance between f and f0.
/// Throws MonodromyMismatch if they are not in the same equivariance class.
HomotopyDistance monitor_homotopy_distance(const DomainGrid& grid, const MapField& f,
                                           const MapField& f0);

/// sup_x |sigma(f)|_g over evolving nodes.
double sup_residual(const DomainGrid& grid, const MapField& f);

struct FlowResult {
  MapField map;
  FlowTrace trace;
};

/// Called after every recorded sample with the state at that time.
using FlowObserver = std::function<void(const FlowSample&, const MapField&)>;

/// Integrates until the residual drops below tolerance (Converged), the
/// homotopy distance blows up while the map keeps moving (Diverged), or t_end.
FlowResult run_flow(const DomainGrid& grid, const MapField& f0, const FlowConfig& cfg,
                    const FlowObserver& observer = {});

}  // namespace hessflow
