#pragma once

#include "hessflow/potential.hpp"
#include "hessflow/tensor.hpp"

namespace hessflow {

/// Lowered coefficients of the s-connection at a point.
struct ConnectionCoefficients {
  double s = 0.0;
  Tensor3 coeffs;       // Gamma^{(s)}_{abd}
  Tensor3 levi_civita;  // Gamma^{(0)}_{abd} = 1/2 d^3 F
};

struct DualChart {
  Vector xi;
  double phi = 0.0;
  Vector x;
  int iterations = 0;
};

struct NewtonOptions {
  int max_iterations = 100;
  /// Stop when ||grad F(x) - xi|| <= rel_tolerance * (1 + ||xi||).
  double rel_tolerance = 1e-10;
};

/// Smallest eigenvalue must exceed this fraction of the trace.
inline constexpr double kSpdRelativeThreshold = 1e-12;

/// Throws NotPositiveDefinite unless `m` is symmetric positive definite.
void require_spd(const Matrix& m, const char* what = "matrix");

bool is_spd(const Matrix& m);

/// gamma_{ab} = d_a d_b F(x).
Matrix metric_from_potential(const PotentialFunction& f, const Vector& x, bool validate_spd = false);

/// Gamma^{(s)}_{abd} = 1/2 (1 - s) d_a d_b d_d F. Rejects s outside [-1, 1].
ConnectionCoefficients s_connection(const PotentialFunction& f, const Vector& x, double s);

/// |Z gamma(V,W) - gamma(nabla^{(s)}_Z V, W) - gamma(V, nabla^{(-s)}_Z W)| for
/// constant-coefficient V, W, Z. Zero up to roundoff for Hessian structures.
double duality_residual(const PotentialFunction& f, const Vector& x, double s, const Vector& v,
                        const Vector& w, const Vector& z);

/// xi_b = d_b F(x).
Vector to_dual_coordinates(const PotentialFunction& f, const Vector& x);

/// Solves grad F(x) = xi by damped Newton from x0 and returns the Legendre
/// potential Phi(xi) = x.xi - F(x). Throws NewtonDiverged.
DualChart legendre_dual(const PotentialFunction& f, const Vector& xi, const Vector& x0,
                        const NewtonOptions& opts = {});
DualChart legendre_dual(const PotentialFunction& f, const Vector& xi);

/// gamma^{ab}, the inverse of the Hessian metric (= Hessian of Phi at xi(x)).
Matrix dual_metric(const PotentialFunction& f, const Vector& x);

}  // namespace hessflow
