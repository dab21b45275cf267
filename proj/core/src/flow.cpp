#include "hessflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "worker_pool.hpp"

namespace hessflow {

std::string to_string(Scheme s) { return s == Scheme::ExplicitEuler ? "ExplicitEuler" : "RK4"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "Converged";
    case Outcome::Diverged: return "Diverged";
    case Outcome::MaxTimeReached: return "MaxTimeReached";
  }
  return "?";
}

double resolve_time_step(const DomainGrid& grid, const FlowConfig& cfg) {
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw InvalidArgument("cfl_safety must lie in (0, 1]");
  if (!(cfg.t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (!(cfg.tol_residual > 0.0)) throw InvalidArgument("tol_residual must be positive");
  if (cfg.monitor_every == 0) throw InvalidArgument("monitor_every must be positive");
  if (!(cfg.divergence_factor > 0.0)) throw InvalidArgument("divergence_factor must be positive");
  const double bound = grid.cfl_bound(cfg.cfl_safety);
  if (cfg.dt == 0.0) return bound;
  if (!(cfg.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (cfg.dt > bound) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "dt = %.6g violates the CFL bound dt <= cfl_safety * h_min^2 / (2 * dim * "
                  "lambda_max) = %.6g",
                  cfg.dt, bound);
    throw CflViolation(buf);
  }
  return cfg.dt;
}

namespace {

// Stencil slots: 1-D {+x, -x}; 2-D {+x, -x, +y, -y, ++, --, +-, -+}.
constexpr std::size_t kSlots1 = 2;
constexpr std::size_t kSlots2 = 8;

/// Neighbour table for every evolving node, with the cover translation each
/// neighbour picks up from the deck action already folded in, and the
/// per-node stencil weights (inverse metric divided by the spacings).
class StencilPlan {
 public:
  StencilPlan(const DomainGrid& grid, std::size_t target_dim,
              const std::vector<std::vector<double>>& axis_shifts)
      : grid_(&grid), n_(target_dim), slots_(grid.dim() == 1 ? kSlots1 : kSlots2) {
    const auto& active = grid.active_nodes();
    nbr_.resize(active.size() * slots_);
    offset_.assign(active.size() * slots_ * n_, 0.0);
    static constexpr long kOff[kSlots2][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                              {1, 1},  {-1, -1}, {1, -1}, {-1, 1}};
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto idx = grid.index(active[k]);
      for (std::size_t s = 0; s < slots_; ++s) {
        const auto w = grid.wrap(idx[0] + kOff[s][0], idx[1] + kOff[s][1]);
        nbr_[k * slots_ + s] = w.node;
        for (std::size_t a = 0; a < axis_shifts.size() && a < 2; ++a) {
          if (w.deck[a] == 0 || axis_shifts[a].empty()) continue;
          for (std::size_t i = 0; i < n_; ++i) {
            offset_[(k * slots_ + s) * n_ + i] += static_cast<double>(w.deck[a]) * axis_shifts[a][i];
            has_offsets_ = true;
          }
        }
      }
    }

    const double hx = grid.spacing(0);
    const double hy = grid.dim() == 2 ? grid.spacing(1) : 1.0;
    inv_2hx_ = 1.0 / (2.0 * hx);
    inv_2hy_ = 1.0 / (2.0 * hy);
    weights_.resize(active.size() * 3);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto gi = grid.inverse_metric(active[k]);
      double* w = &weights_[k * 3];
      if (grid.dim() == 1) {
        w[0] = gi[0] / (hx * hx);
        w[1] = w[2] = 0.0;
      } else {
        w[0] = gi[0] / (hx * hx);
        w[1] = 2.0 * gi[1] / (4.0 * hx * hy);
        w[2] = gi[3] / (hy * hy);
      }
    }
  }

  const DomainGrid& grid() const { return *grid_; }
  std::size_t target_dim() const { return n_; }
  std::size_t size() const { return grid_->active_nodes().size(); }
  std::size_t node(std::size_t k) const { return grid_->active_nodes()[k]; }
  std::size_t slots() const { return slots_; }
  const std::size_t* neighbours(std::size_t k) const { return nbr_.data() + k * slots_; }
  /// Null when no neighbour carries a deck translation.
  const double* offsets(std::size_t k) const {
    return has_offsets_ ? offset_.data() + k * slots_ * n_ : nullptr;
  }
  /// Always valid; zero where no deck translation applies.
  const double* dense_offsets(std::size_t k) const { return offset_.data() + k * slots_ * n_; }
  /// {gamma^xx / hx^2, 2 gamma^xy / (4 hx hy), gamma^yy / hy^2}
  const double* weights(std::size_t k) const { return weights_.data() + k * 3; }
  double inv_2hx() const { return inv_2hx_; }
  double inv_2hy() const { return inv_2hy_; }

 private:
  const DomainGrid* grid_;
  std::size_t n_;
  std::size_t slots_;
  std::vector<std::size_t> nbr_;
  std::vector<double> offset_;
  std::vector<double> weights_;
  double inv_2hx_ = 0.0;
  double inv_2hy_ = 0.0;
  bool has_offsets_ = false;
};

std::vector<std::vector<double>> map_shifts(const DomainGrid& grid, const MapField& f) {
  std::vector<std::vector<double>> out;
  for (std::size_t a = 0; a < grid.dim(); ++a) out.push_back(f.shift(a));
  return out;
}

/// Per-node central differences: first derivatives and the second-derivative
/// combination gamma^{ab} D^2_{ab}, for each target component.
struct NodeDerivatives {
  std::vector<double> d1;   // [axis * n + i]
  std::vector<double> lap;  // [i]

  explicit NodeDerivatives(std::size_t n) : d1(2 * n, 0.0), lap(n, 0.0) {}
};

void differentiate(const StencilPlan& plan, const double* v, std::size_t k, NodeDerivatives& out) {
  const std::size_t n = plan.target_dim();
  const std::size_t node = plan.node(k);
  const std::size_t* nb = plan.neighbours(k);
  const double* off = plan.dense_offsets(k);
  const double* w = plan.weights(k);
  double nv[kSlots2];
  if (plan.slots() == kSlots1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = 0; s < kSlots1; ++s) nv[s] = v[nb[s] * n + i] + off[s * n + i];
      const double c = v[node * n + i];
      out.d1[i] = (nv[0] - nv[1]) * plan.inv_2hx();
      out.lap[i] = w[0] * (nv[0] - 2.0 * c + nv[1]);
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < kSlots2; ++s) nv[s] = v[nb[s] * n + i] + off[s * n + i];
    const double c = v[node * n + i];
    out.d1[i] = (nv[0] - nv[1]) * plan.inv_2hx();
    out.d1[n + i] = (nv[2] - nv[3]) * plan.inv_2hy();
    out.lap[i] = w[0] * (nv[0] - 2.0 * c + nv[1]) + w[1] * ((nv[4] + nv[5]) - (nv[6] + nv[7])) +
                 w[2] * (nv[2] - 2.0 * c + nv[3]);
  }
}

/// Flat targets: sigma = gamma^{ab} D^2_{ab} f componentwise. Same arithmetic
/// as differentiate() so both paths agree bitwise. N = 0 means runtime target dim.
template <std::size_t Slots, std::size_t N>
void flat_tension_range(const StencilPlan& plan, const double* v, double* out, const double* base,
                        double h, std::size_t begin, std::size_t end) {
  const std::size_t n = N ? N : plan.target_dim();
  for (std::size_t k = begin; k < end; ++k) {
    const std::size_t node = plan.node(k);
    const std::size_t* nb = plan.neighbours(k);
    const double* off = plan.dense_offsets(k);
    const double* w = plan.weights(k);
    for (std::size_t i = 0; i < n; ++i) {
      double nv[Slots];
      for (std::size_t s = 0; s < Slots; ++s) nv[s] = v[nb[s] * n + i] + off[s * n + i];
      const double c = v[node * n + i];
      double lap;
      if constexpr (Slots == kSlots1) {
        lap = w[0] * (nv[0] - 2.0 * c + nv[1]);
      } else {
        lap = w[0] * (nv[0] - 2.0 * c + nv[1]) + w[1] * ((nv[4] + nv[5]) - (nv[6] + nv[7])) +
              w[2] * (nv[2] - 2.0 * c + nv[3]);
      }
      out[node * n + i] = base ? base[node * n + i] + h * lap : lap;
    }
  }
}

template <std::size_t Slots>
void flat_tension_dispatch(const StencilPlan& plan, const double* v, double* out, const double* base,
                           double h, std::size_t begin, std::size_t end) {
  switch (plan.target_dim()) {
    case 1: return flat_tension_range<Slots, 1>(plan, v, out, base, h, begin, end);
    case 2: return flat_tension_range<Slots, 2>(plan, v, out, base, h, begin, end);
    default: return flat_tension_range<Slots, 0>(plan, v, out, base, h, begin, end);
  }
}

/// gamma^{ab} A(D_a f, D_b f) for a bilinear form with matrix `form` (n*n).
double contract_gradients(const DomainGrid& grid, std::size_t node, const NodeDerivatives& d,
                          std::size_t n, const double* form, std::size_t stride) {
  const auto gi = grid.inverse_metric(node);
  const std::size_t dim = grid.dim();
  double total = 0.0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const double w = gi[a * dim + b];
      if (w == 0.0) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) s += form[j * stride + l] * d.d1[a * n + j] * d.d1[b * n + l];
      total += w * s;
    }
  return total;
}

class FlowEngine {
 public:
  FlowEngine(const DomainGrid& grid, const MapField& f, unsigned threads)
      : grid_(grid), chart_(f.chart), n_(f.chart->dim()), flat_(f.chart->is_flat()),
        plan_(grid, n_, map_shifts(grid, f)), pool_(detail::resolve_threads(threads)) {}

  const StencilPlan& plan() const { return plan_; }

  /// Writes out = base + h * sigma(v) on active nodes, or sigma(v) when base is null.
  /// `out` is node-major over all nodes; boundary entries are left untouched.
  void tension(const double* v, double* out, const double* base = nullptr, double h = 0.0) const {
    if (flat_) {
      pool_.run(plan_.size(), [&](std::size_t begin, std::size_t end) {
        if (plan_.slots() == kSlots2)
          flat_tension_dispatch<kSlots2>(plan_, v, out, base, h, begin, end);
        else
          flat_tension_dispatch<kSlots1>(plan_, v, out, base, h, begin, end);
      });
      return;
    }
    pool_.run(plan_.size(), [&](std::size_t begin, std::size_t end) {
      NodeDerivatives d(n_);
      std::vector<double> gamma(flat_ ? 0 : n_ * n_ * n_);
      std::vector<double> sigma(n_);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t node = plan_.node(k);
        differentiate(plan_, v, k, d);
        if (flat_) {
          for (std::size_t i = 0; i < n_; ++i) sigma[i] = d.lap[i];
        } else {
          chart_->christoffels(std::span<const double>(v + node * n_, n_), gamma);
          for (std::size_t i = 0; i < n_; ++i)
            sigma[i] = d.lap[i] + contract_gradients(grid_, node, d, n_, gamma.data() + i * n_ * n_, n_);
        }
        double* dst = out + node * n_;
        if (base) {
          const double* b = base + node * n_;
          for (std::size_t i = 0; i < n_; ++i) dst[i] = b[i] + h * sigma[i];
        } else {
          for (std::size_t i = 0; i < n_; ++i) dst[i] = sigma[i];
        }
      }
    });
  }

  /// next = base + h * rate on active nodes; other nodes copied from base.
  void axpy(const double* base, const double* rate, double h, double* next) const {
    pool_.run(plan_.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t node = plan_.node(k);
        for (std::size_t i = 0; i < n_; ++i) next[node * n_ + i] = base[node * n_ + i] + h * rate[node * n_ + i];
      }
    });
  }

  /// Advances `cur` by h into `next` (both full node-major arrays).
  void step(const std::vector<double>& cur, std::vector<double>& next, double h, Scheme scheme,
            double t) {
    const std::size_t total = cur.size();
    if (next.size() != total || plan_.size() * n_ != total) next = cur;
    try {
      if (scheme == Scheme::ExplicitEuler) {
        tension(cur.data(), next.data(), cur.data(), h);
      } else {
        k1_.assign(total, 0.0);
        k2_.assign(total, 0.0);
        k3_.assign(total, 0.0);
        k4_.assign(total, 0.0);
        stage_ = cur;
        tension(cur.data(), k1_.data());
        axpy(cur.data(), k1_.data(), 0.5 * h, stage_.data());
        tension(stage_.data(), k2_.data());
        axpy(cur.data(), k2_.data(), 0.5 * h, stage_.data());
        tension(stage_.data(), k3_.data());
        axpy(cur.data(), k3_.data(), h, stage_.data());
        tension(stage_.data(), k4_.data());
        for (std::size_t k = 0; k < plan_.size(); ++k) {
          const std::size_t node = plan_.node(k);
          for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t e = node * n_ + i;
            next[e] = cur[e] + (h / 6.0) * (k1_[e] + 2.0 * k2_[e] + 2.0 * k3_[e] + k4_[e]);
          }
        }
      }
    } catch (const DomainViolation& e) {
      throw ChartExit(std::string("intermediate stage left the chart: ") + e.what(), 0, t);
    }
    for (std::size_t k = 0; k < plan_.size(); ++k) {
      const std::size_t node = plan_.node(k);
      const std::span<const double> y(next.data() + node * n_, n_);
      const bool inside = flat_ ? std::all_of(y.begin(), y.end(), [](double c) { return std::isfinite(c); })
                                : chart_->contains(y);
      if (!inside) {
        std::string msg = "node " + std::to_string(node) + " left " + chart_->name() + " at t = " +
                          std::to_string(t) + ", value (";
        for (std::size_t i = 0; i < n_; ++i) msg += (i ? ", " : "") + std::to_string(y[i]);
        throw ChartExit(msg + ")", node, t);
      }
    }
  }

  double residual(const double* v) const {
    scratch_.assign(grid_.node_count() * n_, 0.0);
    tension(v, scratch_.data());
    double worst = 0.0;
    std::vector<double> g(n_ * n_);
    for (std::size_t k = 0; k < plan_.size(); ++k) {
      const std::size_t node = plan_.node(k);
      chart_->metric(std::span<const double>(v + node * n_, n_), g);
      worst = std::max(worst, quadratic_form(g, scratch_.data() + node * n_));
    }
    return std::sqrt(worst);
  }

  double kinetic(const double* prev, const double* next, double dt) const {
    double worst = 0.0;
    std::vector<double> g(n_ * n_), rate(n_);
    for (std::size_t node = 0; node < grid_.node_count(); ++node) {
      for (std::size_t i = 0; i < n_; ++i) rate[i] = (next[node * n_ + i] - prev[node * n_ + i]) / dt;
      chart_->metric(std::span<const double>(next + node * n_, n_), g);
      worst = std::max(worst, quadratic_form(g, rate.data()));
    }
    return worst;
  }

  double eta(const double* v) const {
    double worst = 0.0;
    NodeDerivatives d(n_);
    std::vector<double> g(n_ * n_);
    for (std::size_t k = 0; k < plan_.size(); ++k) {
      const std::size_t node = plan_.node(k);
      differentiate(plan_, v, k, d);
      chart_->metric(std::span<const double>(v + node * n_, n_), g);
      worst = std::max(worst, contract_gradients(grid_, node, d, n_, g.data(), n_));
    }
    return worst;
  }

 private:
  double quadratic_form(const std::vector<double>& g, const double* w) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) s += g[i * n_ + j] * w[i] * w[j];
    return s;
  }

  const DomainGrid& grid_;
  ChartPtr chart_;
  std::size_t n_;
  bool flat_;
  StencilPlan plan_;
  mutable detail::WorkerPool pool_;
  std::vector<double> k1_, k2_, k3_, k4_, stage_;
  mutable std::vector<double> scratch_;
};

void check_same_class(const MapField& f, const MapField& f0) {
  if (f.chart != f0.chart && (f.chart->name() != f0.chart->name()))
    throw MonodromyMismatch("maps live on different target charts");
  if (f.monodromy != f0.monodromy)
    throw MonodromyMismatch("maps have different monodromy (not in the same equivariance class)");
  if (f.values.size() != f0.values.size()) throw ShapeMismatch("maps have different sizes");
}

HomotopyDistance homotopy_distance(const MapField& f, const MapField& f0) {
  HomotopyDistance out{0.0, std::numeric_limits<double>::infinity()};
  const std::size_t nodes = f.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    const double d = lift_delta(*f.chart, f.at(node), f0.at(node));
    out.sup = std::max(out.sup, d);
    out.inf = std::min(out.inf, d);
  }
  if (nodes == 0) out.inf = 0.0;
  return out;
}

}  // namespace

std::vector<double> affine_laplacian(const DomainGrid& grid, std::span<const double> u,
                                     std::span<const double> period_shifts) {
  if (u.size() != grid.node_count())
    throw ShapeMismatch("affine_laplacian: field has " + std::to_string(u.size()) +
                        " values, grid has " + std::to_string(grid.node_count()) + " nodes");
  if (!period_shifts.empty() && period_shifts.size() != grid.dim())
    throw ShapeMismatch("affine_laplacian: need one period shift per domain axis");
  std::vector<std::vector<double>> shifts;
  for (double s : period_shifts) shifts.push_back({s});
  const StencilPlan plan(grid, 1, shifts);
  std::vector<double> out(grid.node_count(), 0.0);
  NodeDerivatives d(1);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    differentiate(plan, u.data(), k, d);
    out[plan.node(k)] = d.lap[0];
  }
  return out;
}

std::vector<double> tension_field(const DomainGrid& grid, const MapField& f) {
  validate_map(grid, f);
  const FlowEngine engine(grid, f, 1);
  std::vector<double> out(f.values.size(), 0.0);
  engine.tension(f.values.data(), out.data());
  return out;
}

MapField flow_step(const DomainGrid& grid, const MapField& f, const FlowConfig& cfg) {
  validate_map(grid, f);
  const double dt = resolve_time_step(grid, cfg);
  FlowEngine engine(grid, f, cfg.threads);
  MapField next = f;
  engine.step(f.values, next.values, dt, cfg.scheme, 0.0);
  return next;
}

double monitor_kinetic(const DomainGrid& grid, const MapField& f_prev, const MapField& f_next,
                       double dt) {
  validate_map(grid, f_next);
  check_same_class(f_next, f_prev);
  if (!(dt > 0.0)) throw InvalidArgument("monitor_kinetic: dt must be positive");
  const FlowEngine engine(grid, f_next, 1);
  return engine.kinetic(f_prev.values.data(), f_next.values.data(), dt);
}

double monitor_eta(const DomainGrid& grid, const MapField& f) {
  validate_map(grid, f);
  const FlowEngine engine(grid, f, 1);
  return engine.eta(f.values.data());
}

HomotopyDistance monitor_homotopy_distance(const DomainGrid& grid, const MapField& f,
                                           const MapField& f0) {
  validate_map(grid, f);
  validate_map(grid, f0);
  check_same_class(f, f0);
  return homotopy_distance(f, f0);
}

double sup_residual(const DomainGrid& grid, const MapField& f) {
  validate_map(grid, f);
  const FlowEngine engine(grid, f, 1);
  return engine.residual(f.values.data());
}

FlowResult run_flow(const DomainGrid& grid, const MapField& f0, const FlowConfig& cfg,
                    const FlowObserver& observer) {
  validate_map(grid, f0);
  const double dt = resolve_time_step(grid, cfg);
  FlowEngine engine(grid, f0, cfg.threads);

  FlowResult result{f0, {}};
  FlowTrace& trace = result.trace;
  trace.dt = dt;
  MapField& f = result.map;
  std::vector<double> prev = f0.values;

  auto record = [&](FlowSample s) {
    if (!trace.samples.empty()) {
      const double increase = s.sup_kinetic - trace.samples.back().sup_kinetic;
      if (increase > trace.kinetic_tolerance) trace.kinetic_monotone = false;
      trace.kinetic_max_increase = std::max(trace.kinetic_max_increase, increase);
    }
    trace.samples.push_back(s);
    if (observer) observer(s, f);
  };

  // t = 0: f_t = sigma(f0).
  FlowSample s0;
  s0.sup_residual = engine.residual(f0.values.data());
  s0.sup_kinetic = s0.sup_residual * s0.sup_residual;
  s0.sup_eta = engine.eta(f0.values.data());
  const HomotopyDistance d0 = homotopy_distance(f0, f0);
  s0.sup_dtilde = d0.sup;
  s0.inf_dtilde = d0.inf;
  const double h_min = grid.h_min();
  trace.kinetic_tolerance = 1e-6 * s0.sup_kinetic + 10.0 * dt * h_min * h_min;
  const double divergence_threshold = cfg.divergence_factor * (s0.sup_dtilde + 1.0);
  record(s0);
  if (s0.sup_residual <= cfg.tol_residual) {
    trace.outcome = Outcome::Converged;
    return result;
  }

  const auto total_steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.t_end / dt - 1e-9)));
  std::vector<double> next;
  for (std::size_t step = 1; step <= total_steps; ++step) {
    const bool last = step == total_steps;
    const double t_prev = static_cast<double>(step - 1) * dt;
    const double t = last ? cfg.t_end : static_cast<double>(step) * dt;
    const double h = t - t_prev;
    try {
      engine.step(f.values, next, h, cfg.scheme, t);
    } catch (const ChartExit& e) {
      trace.outcome = Outcome::MaxTimeReached;
      throw FlowChartExit(e, trace);
    }
    prev.swap(f.values);
    f.values.swap(next);
    trace.steps = step;

    if (step % cfg.monitor_every != 0 && !last) continue;
    FlowSample s;
    s.t = t;
    s.sup_kinetic = engine.kinetic(prev.data(), f.values.data(), h);
    s.sup_eta = engine.eta(f.values.data());
    const HomotopyDistance d = homotopy_distance(f, f0);
    s.sup_dtilde = d.sup;
    s.inf_dtilde = d.inf;
    s.sup_residual = engine.residual(f.values.data());
    record(s);
    if (s.sup_residual <= cfg.tol_residual) {
      trace.outcome = Outcome::Converged;
      return result;
    }
    if (s.sup_dtilde > divergence_threshold && s.sup_kinetic > cfg.tol_residual) {
      trace.outcome = Outcome::Diverged;
      return result;
    }
  }
  trace.outcome = Outcome::MaxTimeReached;
  return result;
}

}  // namespace hessflow
