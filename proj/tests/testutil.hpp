#pragma once

#include <functional>
#include <vector>

#include "fairtext/nn/tape.hpp"
#include "fairtext/rng.hpp"

namespace testutil {

using fairtext::Rng;
using fairtext::nn::Mat;

inline Mat random_mat(Rng& rng, int rows, int cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
  return m;
}

// Central finite difference of `eval` w.r.t. the value stored at `slot`.
inline double central_diff(const std::function<double()>& eval, double& slot,
                           double eps = 1e-6) {
  const double saved = slot;
  slot = saved + eps;
  const double hi = eval();
  slot = saved - eps;
  const double lo = eval();
  slot = saved;
  return (hi - lo) / (2.0 * eps);
}

inline double rel_err(double a, double b) {
  const double denom = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / denom;
}

// Verifies an analytic parameter gradient entry-by-entry against central
// finite differences of a freshly rebuilt loss.
inline double max_grad_rel_err(fairtext::nn::Parameter& param,
                               const Mat& analytic,
                               const std::function<double()>& eval,
                               double eps = 1e-6) {
  double worst = 0.0;
  for (int c = 0; c < param.value.cols(); ++c)
    for (int r = 0; r < param.value.rows(); ++r) {
      const double fd = central_diff(eval, param.value(r, c), eps);
      worst = std::max(worst, rel_err(analytic(r, c), fd));
    }
  return worst;
}

}  // namespace testutil
