#include "fairtext/nn/adam.hpp"

#include <cmath>

namespace fairtext::nn {

AdamOptimizer::AdamOptimizer(std::vector<Parameter*> params, double lr,
                             double clip_value, double beta1, double beta2,
                             double eps)
    : params_(std::move(params)),
      lr_(lr),
      clip_(clip_value),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamOptimizer::zero_grad() {
  for (Parameter* p : params_) p->grad.setZero();
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    if (p.frozen_col >= 0) p.grad.col(p.frozen_col).setZero();
    if (clip_ > 0.0)
      p.grad = p.grad.cwiseMax(-clip_).cwiseMin(clip_);
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= lr_ * (m_[i].array() / bc1) /
                       ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace fairtext::nn
