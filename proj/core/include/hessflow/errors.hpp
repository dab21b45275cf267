#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hessflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Hessian (or sampled metric) failed the SPD test.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

/// A chart was queried outside its valid region (e.g. half-plane v <= 0).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class MonodromyMismatch : public Error {
 public:
  using Error::Error;
};

/// Time step violates the explicit stability bound.
class CflViolation : public Error {
 public:
  using Error::Error;
};

/// A flow step moved a node out of the target chart.
class ChartExit : public Error {
 public:
  ChartExit(const std::string& what, std::size_t node, double time)
      : Error(what), node_(node), time_(time) {}

  std::size_t node() const noexcept { return node_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t node_;
  double time_;
};

/// Scenario/config problems. `field` names the offending key, `line` is 1-based (0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0)
      : Error(what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace hessflow
