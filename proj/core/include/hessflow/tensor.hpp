#pragma once

#include <cstddef>
#include <vector>

namespace hessflow {

/// Dense rank-3 array T[a][b][c] over an n-dimensional index range.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t n, double fill = 0.0) : n_(n), data_(n * n * n, fill) {}

  std::size_t dim() const noexcept { return n_; }

  double& operator()(std::size_t a, std::size_t b, std::size_t c) {
    return data_[(a * n_ + b) * n_ + c];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return data_[(a * n_ + b) * n_ + c];
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  Tensor3& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  /// Writes v at (a,b,c) and every permutation of it.
  void set_symmetric(std::size_t a, std::size_t b, std::size_t c, double v) {
    (*this)(a, b, c) = (*this)(a, c, b) = (*this)(b, a, c) = v;
    (*this)(b, c, a) = (*this)(c, a, b) = (*this)(c, b, a) = v;
  }

  /// Largest |T(a,b,c) - T(p(a,b,c))| over all index permutations.
  double symmetry_defect() const;

  /// Largest absolute entry.
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline Tensor3 operator*(double s, Tensor3 t) {
  t *= s;
  return t;
}

}  // namespace hessflow
