#include "hessflow/potential.hpp"

#include <algorithm>
#include <cmath>

#include "hessflow/catalog.hpp"
#include "hessflow/errors.hpp"

namespace hessflow {

namespace {

void require_dim(const Vector& x, std::size_t n, const char* who) {
  if (static_cast<std::size_t>(x.size()) != n)
    throw ShapeMismatch(std::string(who) + ": point has dimension " + std::to_string(x.size()) +
                        ", potential has dimension " + std::to_string(n));
}

}  // namespace

// ---------------------------------------------------------------- quadratic

QuadraticPotential::QuadraticPotential(Matrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw InvalidArgument("quadratic potential needs a non-empty square matrix");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw InvalidArgument("quadratic potential needs a symmetric matrix");
}

std::string QuadraticPotential::name() const {
  std::string s = "quadratic(";
  for (Eigen::Index i = 0; i < a_.rows(); ++i)
    for (Eigen::Index j = 0; j < a_.cols(); ++j) {
      if (i || j) s += ",";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", a_(i, j));
      s += buf;
    }
  return s + ")";
}

double QuadraticPotential::eval(const Vector& x) const {
  require_dim(x, dim(), "quadratic");
  return 0.5 * x.dot(a_ * x);
}

Vector QuadraticPotential::grad(const Vector& x) const {
  require_dim(x, dim(), "quadratic");
  return a_ * x;
}

Matrix QuadraticPotential::hess(const Vector& x) const {
  require_dim(x, dim(), "quadratic");
  return a_;
}

Tensor3 QuadraticPotential::third(const Vector& x) const {
  require_dim(x, dim(), "quadratic");
  return Tensor3(dim());
}

// ---------------------------------------------------------------- sum_exp

SumExpPotential::SumExpPotential(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("sum_exp needs dimension >= 1");
}

double SumExpPotential::eval(const Vector& x) const {
  require_dim(x, n_, "sum_exp");
  return x.array().exp().sum();
}

Vector SumExpPotential::grad(const Vector& x) const {
  require_dim(x, n_, "sum_exp");
  return x.array().exp().matrix();
}

Matrix SumExpPotential::hess(const Vector& x) const {
  require_dim(x, n_, "sum_exp");
  return x.array().exp().matrix().asDiagonal();
}

Tensor3 SumExpPotential::third(const Vector& x) const {
  require_dim(x, n_, "sum_exp");
  Tensor3 t(n_);
  for (std::size_t i = 0; i < n_; ++i) t(i, i, i) = std::exp(x[static_cast<Eigen::Index>(i)]);
  return t;
}

// ---------------------------------------------------------------- log_sum_exp

LogSumExpPotential::LogSumExpPotential(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("log_sum_exp needs dimension >= 1");
}

double LogSumExpPotential::eval(const Vector& x) const {
  require_dim(x, n_, "log_sum_exp");
  const double m = std::max(0.0, x.maxCoeff());
  return m + std::log(std::exp(-m) + (x.array() - m).exp().sum());
}

Vector LogSumExpPotential::weights(const Vector& x) const {
  require_dim(x, n_, "log_sum_exp");
  const double m = std::max(0.0, x.maxCoeff());
  const Vector e = (x.array() - m).exp().matrix();
  return e / (std::exp(-m) + e.sum());
}

Vector LogSumExpPotential::grad(const Vector& x) const { return weights(x); }

Matrix LogSumExpPotential::hess(const Vector& x) const {
  const Vector p = weights(x);
  Matrix h = -p * p.transpose();
  h.diagonal() += p;
  return h;
}

Tensor3 LogSumExpPotential::third(const Vector& x) const {
  const Vector p = weights(x);
  Tensor3 t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      for (std::size_t k = j; k < n_; ++k) {
        const double pi = p[static_cast<Eigen::Index>(i)];
        const double pj = p[static_cast<Eigen::Index>(j)];
        const double pk = p[static_cast<Eigen::Index>(k)];
        double v = 2.0 * pi * pj * pk;
        if (i == j) v -= pi * pk;
        if (i == k) v -= pi * pj;
        if (j == k) v -= pj * pi;
        if (i == j && j == k) v += pi;
        t.set_symmetric(i, j, k, v);
      }
  return t;
}

// ---------------------------------------------------------------- finite differences

FiniteDifferencePotential::FiniteDifferencePotential(std::size_t n, EvalFn eval, double step,
                                                     std::string name)
    : n_(n), eval_(std::move(eval)), h_(step), name_(std::move(name)) {
  if (n == 0) throw InvalidArgument("finite-difference potential needs dimension >= 1");
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (!eval_) throw InvalidArgument("finite-difference potential needs an eval function");
}

namespace {

// Composition of central differences along the listed axes, all with step h.
double central_difference(const FiniteDifferencePotential::EvalFn& f, const Vector& x,
                          std::initializer_list<std::size_t> axes, double h) {
  const std::size_t k = axes.size();
  double sum = 0.0;
  Vector p(x.size());
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    p = x;
    double sign = 1.0;
    std::size_t bit = 0;
    for (std::size_t axis : axes) {
      const bool minus = (mask >> bit) & 1u;
      p[static_cast<Eigen::Index>(axis)] += minus ? -h : h;
      if (minus) sign = -sign;
      ++bit;
    }
    sum += sign * f(p);
  }
  return sum / std::pow(2.0 * h, static_cast<double>(k));
}

}  // namespace

Vector FiniteDifferencePotential::grad(const Vector& x) const {
  require_dim(x, n_, "finite-difference potential");
  Vector g(static_cast<Eigen::Index>(n_));
  for (std::size_t a = 0; a < n_; ++a)
    g[static_cast<Eigen::Index>(a)] = central_difference(eval_, x, {a}, h_);
  return g;
}

Matrix FiniteDifferencePotential::hess(const Vector& x) const {
  require_dim(x, n_, "finite-difference potential");
  const auto n = static_cast<Eigen::Index>(n_);
  Matrix m(n, n);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a; b < n_; ++b) {
      const double v = central_difference(eval_, x, {a, b}, h_);
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  return m;
}

Tensor3 FiniteDifferencePotential::third(const Vector& x) const {
  require_dim(x, n_, "finite-difference potential");
  Tensor3 t(n_);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = a; b < n_; ++b)
      for (std::size_t c = b; c < n_; ++c) {
        const double v = central_difference(eval_, x, {a, b, c}, h_);
        t.set_symmetric(a, b, c, v);
      }
  return t;
}

// ---------------------------------------------------------------- catalog

PotentialPtr make_potential(const std::string& spec, std::size_t dim) {
  const CatalogRef ref = parse_catalog_ref(spec);
  if (ref.name == "quadratic") {
    const std::size_t count = ref.args.size();
    const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(count))));
    if (count == 0 || n * n != count)
      throw InvalidArgument("quadratic(A) needs n*n coefficients, got " + std::to_string(count));
    if (dim != 0 && n != dim)
      throw InvalidArgument("quadratic(A) has dimension " + std::to_string(n) + ", expected " +
                            std::to_string(dim));
    Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ref.args[i * n + j];
    return std::make_shared<QuadraticPotential>(std::move(a));
  }
  if (ref.name == "sum_exp" || ref.name == "log_sum_exp") {
    if (!ref.args.empty()) throw InvalidArgument(ref.name + " takes no parameters");
    if (dim == 0) throw InvalidArgument(ref.name + " needs a dimension");
    if (ref.name == "sum_exp") return std::make_shared<SumExpPotential>(dim);
    return std::make_shared<LogSumExpPotential>(dim);
  }
  throw InvalidArgument("unknown potential '" + ref.name + "'");
}

}  // namespace hessflow
