#include "hessflow/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace hessflow {

double Tensor3::symmetry_defect() const {
  double worst = 0.0;
  const Tensor3& t = *this;
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b)
      for (std::size_t c = 0; c < n_; ++c) {
        const double ref = t(a, b, c);
        for (double other : {t(a, c, b), t(b, a, c), t(b, c, a), t(c, a, b), t(c, b, a)})
          worst = std::max(worst, std::abs(ref - other));
      }
  return worst;
}

double Tensor3::max_abs() const {
  double worst = 0.0;
  for (double v : data_) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace hessflow
