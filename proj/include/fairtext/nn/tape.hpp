#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fairtext/rng.hpp"

namespace fairtext::nn {

using Mat = Eigen::MatrixXd;

// Trainable tensor. `grad` is an accumulator owned by the parameter so that
// several backward passes (and several leaves bound to the same parameter)
// sum into one place; optimizers zero it between steps.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;
  // Column pinned to zero (embedding pad slot): its gradient is discarded
  // before every optimizer update, so the value never moves.
  int frozen_col = -1;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)),
        value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  void init_uniform(Rng& rng, double lo, double hi) {
    for (int c = 0; c < value.cols(); ++c)
      for (int r = 0; r < value.rows(); ++r) value(r, c) = rng.uniform(lo, hi);
    if (frozen_col >= 0) value.col(frozen_col).setZero();
  }

  // Glorot-style range from the tensor shape.
  void init_xavier(Rng& rng) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(value.rows() + value.cols()));
    init_uniform(rng, -bound, bound);
  }
};

// Handle to a tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff over Eigen matrices, define-by-run: every op
// computes its value immediately and records how to push gradients to its
// parents. One tape per mini-batch; parameters outlive tapes.
//
// backward() may be called more than once on the same tape (node gradients
// are reset each call); parameter gradients accumulate across calls.
class Tape {
 public:
  Tape() { nodes_.reserve(512); }

  // ----- leaves -----
  Var constant(Mat v);
  // Read-only view of a parameter: gradients do not flow into it, but do
  // flow through ops that consume it.
  Var frozen(const Parameter& p);
  // Trainable leaf: backward() adds into p.grad.
  Var param(Parameter& p);

  // ----- ops -----
  // Gather columns of an embedding table: out.col(b) = table.col(ids[b]).
  Var lookup(Var table, const std::vector<int>& ids);
  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var hadamard(Var a, Var b);
  Var scale(Var x, double c);
  Var add_bias(Var x, Var bias);  // bias is (rows x 1)
  Var relu(Var x);
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var concat_rows(const std::vector<Var>& xs);
  Var row(Var x, int r);
  // x:(R x C) scaled column-wise by s:(1 x C).
  Var colwise_scale(Var x, Var s);
  // Element-wise max over xs[t], restricted to entries with valid[t][b] set;
  // columns with no valid t yield 0 (and receive no gradient).
  Var masked_max(const std::vector<Var>& xs,
                 const std::vector<std::vector<char>>& valid);
  // Column-wise softmax over rows [0, len(b)); rows at and past len(b) are
  // exactly zero. len(b) == 0 yields a zero column.
  Var masked_softmax_cols(Var scores, const std::vector<int>& lengths);
  Var softmax_cols(Var logits);
  Var dropout(Var x, double p, Rng& rng, bool training);
  // Identity forward; backward multiplies the incoming gradient by -lambda.
  Var grad_reverse(Var x, double lambda);
  // Mean over the batch of weighted cross-entropy from logits (K x B).
  // weights empty means all ones. Returns a 1x1 node.
  Var cross_entropy(Var logits, const std::vector<int>& labels,
                    const std::vector<double>& weights = {});

  // ----- execution -----
  const Mat& value(Var v) const;
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    const Mat* ext = nullptr;  // set for frozen/param leaves (no copy)
    Mat grad;
    bool touched = false;
    bool needs_grad = false;
    Parameter* sink = nullptr;
    std::function<void(Tape&, const Mat&)> back;
  };

  std::vector<Node> nodes_;

  int push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  bool wants(Var v) const { return nodes_[v.id].needs_grad; }
  // Accumulate `delta` into v's gradient buffer if v participates.
  void acc(Var v, const Mat& delta);
  Mat& grad_buf(Var v);
};

}  // namespace fairtext::nn
