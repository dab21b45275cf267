#include "hessflow/hessian_geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hessflow/errors.hpp"

namespace hessflow {

bool is_spd(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()),
                                                  Eigen::EigenvaluesOnly);
  const double trace = m.trace();
  return trace > 0.0 && eig.eigenvalues().minCoeff() > kSpdRelativeThreshold * trace;
}

void require_spd(const Matrix& m, const char* what) {
  if (!is_spd(m)) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
}

Matrix metric_from_potential(const PotentialFunction& f, const Vector& x, bool validate_spd) {
  Matrix g = f.hess(x);
  if (validate_spd) require_spd(g, "Hessian metric");
  return g;
}

ConnectionCoefficients s_connection(const PotentialFunction& f, const Vector& x, double s) {
  if (!(s >= -1.0 && s <= 1.0))
    throw InvalidArgument("s-connection parameter must lie in [-1, 1], got " + std::to_string(s));
  ConnectionCoefficients out;
  out.s = s;
  const Tensor3 t = f.third(x);
  out.levi_civita = 0.5 * t;
  out.coeffs = (0.5 * (1.0 - s)) * t;
  return out;
}

namespace {

// T(a, b, c) contracted with three vectors.
double contract(const Tensor3& t, const Vector& a, const Vector& b, const Vector& c) {
  const std::size_t n = t.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        sum += t(i, j, k) * a[static_cast<Eigen::Index>(i)] * b[static_cast<Eigen::Index>(j)] *
               c[static_cast<Eigen::Index>(k)];
  return sum;
}

}  // namespace

double duality_residual(const PotentialFunction& f, const Vector& x, double s, const Vector& v,
                        const Vector& w, const Vector& z) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  if (v.size() != n || w.size() != n || z.size() != n)
    throw ShapeMismatch("duality_residual: vector dimensions must match the potential");
  // Z gamma(V, W) = Z^d d_d d_a d_b F V^a W^b.
  const Tensor3 t = f.third(x);
  double derivative = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index d = 0; d < n; ++d)
        derivative += t(static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                        static_cast<std::size_t>(d)) *
                      v[a] * w[b] * z[d];
  // gamma(nabla_Z V, W) = Z^a V^b Gamma_{ab d} W^d for constant V.
  const ConnectionCoefficients plus = s_connection(f, x, s);
  const ConnectionCoefficients minus = s_connection(f, x, -s);
  const double left = contract(plus.coeffs, z, v, w);
  const double right = contract(minus.coeffs, z, w, v);
  return std::abs(derivative - left - right);
}

Vector to_dual_coordinates(const PotentialFunction& f, const Vector& x) { return f.grad(x); }

DualChart legendre_dual(const PotentialFunction& f, const Vector& xi, const Vector& x0,
                        const NewtonOptions& opts) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  if (xi.size() != n || x0.size() != n)
    throw ShapeMismatch("legendre_dual: xi and x0 must match the potential dimension");
  const double tol = opts.rel_tolerance * (1.0 + xi.norm());

  // Minimize G(x) = F(x) - x.xi; its gradient is grad F - xi.
  auto objective = [&](const Vector& p) { return f.eval(p) - p.dot(xi); };

  Vector x = x0;
  double g_val = objective(x);
  if (!std::isfinite(g_val)) throw NewtonDiverged("legendre_dual: potential not finite at x0");
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const Vector residual = f.grad(x) - xi;
    if (residual.norm() <= tol) {
      DualChart out;
      out.xi = xi;
      out.x = x;
      out.phi = x.dot(xi) - f.eval(x);
      out.iterations = it;
      return out;
    }
    if (it == opts.max_iterations) break;

    const Matrix h = f.hess(x);
    const Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success || !is_spd(h))
      throw NewtonDiverged("legendre_dual: Hessian not positive definite along the Newton path");
    const Vector step = llt.solve(-residual);
    const double slope = residual.dot(step);

    // Once the decrement is below the objective's roundoff, Armijo cannot tell steps apart;
    // this is the quadratic-convergence region, so the full step is taken.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(g_val));
    if (-slope <= roundoff) {
      x += step;
      g_val = objective(x);
      continue;
    }

    // Backtracking by halving with an Armijo condition.
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      const Vector trial = x + t * step;
      const double trial_val = objective(trial);
      if (std::isfinite(trial_val) && trial_val <= g_val + 1e-4 * t * slope) {
        x = trial;
        g_val = trial_val;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Objective is flat to roundoff; take the full step if it reduces the gradient.
      const Vector trial = x + step;
      if ((f.grad(trial) - xi).norm() < residual.norm()) {
        x = trial;
        g_val = objective(x);
      } else {
        throw NewtonDiverged("legendre_dual: line search failed");
      }
    }
  }
  throw NewtonDiverged("legendre_dual: no convergence within " +
                       std::to_string(opts.max_iterations) + " iterations");
}

DualChart legendre_dual(const PotentialFunction& f, const Vector& xi) {
  return legendre_dual(f, xi, Vector::Zero(static_cast<Eigen::Index>(f.dim())));
}

Matrix dual_metric(const PotentialFunction& f, const Vector& x) {
  const Matrix g = metric_from_potential(f, x, true);
  return g.llt().solve(Matrix::Identity(g.rows(), g.cols()));
}

}  // namespace hessflow
