#pragma once

#include <vector>

#include "fairtext/nn/tape.hpp"

namespace fairtext::nn {

// Adam with per-component gradient value clipping applied before the moment
// updates. Each optimizer owns a disjoint parameter group; a parameter must
// never appear in two optimizers.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Parameter*> params, double lr,
                double clip_value = 0.25, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void zero_grad();
  // Clips gradients in place (so the clipped values are observable), then
  // applies the bias-corrected Adam update. Frozen columns stay untouched.
  void step();

  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
  double lr_;
  double clip_;
  double beta1_;
  double beta2_;
  double eps_;
  long t_ = 0;
};

}  // namespace fairtext::nn
