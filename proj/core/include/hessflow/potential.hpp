#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "hessflow/tensor.hpp"

namespace hessflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Convex potential F on an affine chart, with derivatives up to third order.
/// Implementations must be C^3 on their domain; hess() is the Hessian metric.
class PotentialFunction {
 public:
  virtual ~PotentialFunction() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;

  virtual double eval(const Vector& x) const = 0;
  virtual Vector grad(const Vector& x) const = 0;
  virtual Matrix hess(const Vector& x) const = 0;
  virtual Tensor3 third(const Vector& x) const = 0;
};

using PotentialPtr = std::shared_ptr<const PotentialFunction>;

/// F(x) = 1/2 x^T A x with A symmetric.
class QuadraticPotential final : public PotentialFunction {
 public:
  explicit QuadraticPotential(Matrix a);

  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  std::string name() const override;
  double eval(const Vector& x) const override;
  Vector grad(const Vector& x) const override;
  Matrix hess(const Vector& x) const override;
  Tensor3 third(const Vector& x) const override;

  const Matrix& coefficients() const noexcept { return a_; }

 private:
  Matrix a_;
};

/// F(x) = sum_i exp(x_i).
class SumExpPotential final : public PotentialFunction {
 public:
  explicit SumExpPotential(std::size_t n);

  std::size_t dim() const override { return n_; }
  std::string name() const override { return "sum_exp"; }
  double eval(const Vector& x) const override;
  Vector grad(const Vector& x) const override;
  Matrix hess(const Vector& x) const override;
  Tensor3 third(const Vector& x) const override;

 private:
  std::size_t n_;
};

/// F(x) = log(1 + sum_i exp(x_i)), the cumulant of the categorical family.
/// Strictly convex, gradient image is the open simplex {xi_i > 0, sum xi_i < 1}.
class LogSumExpPotential final : public PotentialFunction {
 public:
  explicit LogSumExpPotential(std::size_t n);

  std::size_t dim() const override { return n_; }
  std::string name() const override { return "log_sum_exp"; }
  double eval(const Vector& x) const override;
  Vector grad(const Vector& x) const override;
  Matrix hess(const Vector& x) const override;
  Tensor3 third(const Vector& x) const override;

  /// Softmax weights p_i = exp(x_i) / (1 + sum_j exp(x_j)).
  Vector weights(const Vector& x) const;

 private:
  std::size_t n_;
};

/// Wraps a potential that only provides eval(); all derivatives by central
/// differences with a caller-set step.
class FiniteDifferencePotential final : public PotentialFunction {
 public:
  using EvalFn = std::function<double(const Vector&)>;

  FiniteDifferencePotential(std::size_t n, EvalFn eval, double step, std::string name = "fd");

  std::size_t dim() const override { return n_; }
  std::string name() const override { return name_; }
  double eval(const Vector& x) const override { return eval_(x); }
  Vector grad(const Vector& x) const override;
  Matrix hess(const Vector& x) const override;
  Tensor3 third(const Vector& x) const override;

  double step() const noexcept { return h_; }

 private:
  std::size_t n_;
  EvalFn eval_;
  double h_;
  std::string name_;
};

/// Resolve a catalog name: "quadratic(a11,a12,...,ann)", "sum_exp", "log_sum_exp".
/// `dim` fixes the dimension for the parameter-free entries and is checked
/// against the quadratic's coefficient count.
PotentialPtr make_potential(const std::string& spec, std::size_t dim);

}  // namespace hessflow
