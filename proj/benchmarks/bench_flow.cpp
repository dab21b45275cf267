#include <cmath>
#include <numbers>

#include <benchmark/benchmark.h>

#include "hessflow/flow.hpp"
#include "hessflow/hessian_geometry.hpp"

using namespace hessflow;

namespace {

DomainGrid periodic_grid(std::size_t n) {
  GridSpec spec;
  spec.dim = 2;
  spec.shape = {n, n};
  return DomainGrid(spec, inverse_metric_from_potential(make_potential("quadratic(8,0,0,12)", 2)));
}

DomainGrid dirichlet_grid(std::size_t n) {
  GridSpec spec;
  spec.dim = 2;
  spec.shape = {n, n};
  spec.boundary = Boundary::Dirichlet;
  return DomainGrid(spec, inverse_metric_from_potential(make_potential("sum_exp", 2)));
}

MapField circle_map(const DomainGrid& g) {
  return sample_map(g, make_flat_torus({1.0}), [](std::span<const double> x, std::span<double> y) {
    y[0] = x[0] + 0.1 * std::sin(2 * std::numbers::pi * x[1]);
  }, {{1}, {0}});
}

MapField half_plane_map(const DomainGrid& g) {
  return sample_map(g, make_hyperbolic_half_plane(), [](std::span<const double> x, std::span<double> y) {
    y[0] = std::sin(3 * x[0]) * x[1];
    y[1] = 1.0 + 0.5 * x[0] * x[0];
  });
}

void BM_TensionFlat(benchmark::State& state) {
  const DomainGrid g = periodic_grid(static_cast<std::size_t>(state.range(0)));
  const MapField f = circle_map(g);
  for (auto _ : state) benchmark::DoNotOptimize(tension_field(g, f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.node_count()));
}
BENCHMARK(BM_TensionFlat)->Arg(32)->Arg(64)->Arg(128);

void BM_TensionHalfPlane(benchmark::State& state) {
  const DomainGrid g = dirichlet_grid(static_cast<std::size_t>(state.range(0)));
  const MapField f = half_plane_map(g);
  for (auto _ : state) benchmark::DoNotOptimize(tension_field(g, f));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.node_count()));
}
BENCHMARK(BM_TensionHalfPlane)->Arg(32)->Arg(64)->Arg(128);

// 200 Euler steps per iteration, so per-call setup is amortized.
void BM_RunFlowEuler(benchmark::State& state) {
  const DomainGrid g = periodic_grid(static_cast<std::size_t>(state.range(0)));
  const MapField f = circle_map(g);
  FlowConfig cfg;
  cfg.tol_residual = 1e-300;
  cfg.monitor_every = 100;
  cfg.t_end = 200 * resolve_time_step(g, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_flow(g, f, cfg));
  state.SetItemsProcessed(state.iterations() * 200 * static_cast<long>(g.node_count()));
}
BENCHMARK(BM_RunFlowEuler)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FlowStepRk4HalfPlane(benchmark::State& state) {
  const DomainGrid g = dirichlet_grid(static_cast<std::size_t>(state.range(0)));
  const MapField f = half_plane_map(g);
  FlowConfig cfg;
  cfg.scheme = Scheme::RK4;
  for (auto _ : state) benchmark::DoNotOptimize(flow_step(g, f, cfg));
}
BENCHMARK(BM_FlowStepRk4HalfPlane)->Arg(32)->Arg(64);

void BM_LegendreDual(benchmark::State& state) {
  const PotentialPtr f = make_potential("log_sum_exp", 3);
  Vector x(3);
  x << 0.4, -1.2, 0.9;
  const Vector xi = f->grad(x);
  for (auto _ : state) benchmark::DoNotOptimize(legendre_dual(*f, xi));
}
BENCHMARK(BM_LegendreDual);

}  // namespace
BENCHMARK_MAIN();
