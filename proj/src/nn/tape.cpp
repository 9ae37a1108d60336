#include "fairtext/nn/tape.hpp"

#include <algorithm>
#include <cmath>

#include "fairtext/error.hpp"

namespace fairtext::nn {

const Mat& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.ext ? *n.ext : n.value;
}

Mat& Tape::grad_buf(Var v) {
  Node& n = nodes_[v.id];
  if (!n.touched) {
    const Mat& val = n.ext ? *n.ext : n.value;
    n.grad = Mat::Zero(val.rows(), val.cols());
    n.touched = true;
  }
  return n.grad;
}

void Tape::acc(Var v, const Mat& delta) {
  if (!nodes_[v.id].needs_grad) return;
  grad_buf(v) += delta;
}

Var Tape::constant(Mat v) {
  Node n;
  n.value = std::move(v);
  return {push(std::move(n))};
}

Var Tape::frozen(const Parameter& p) {
  Node n;
  n.ext = &p.value;
  return {push(std::move(n))};
}

Var Tape::param(Parameter& p) {
  Node n;
  n.ext = &p.value;
  n.needs_grad = true;
  n.sink = &p;
  return {push(std::move(n))};
}

Var Tape::lookup(Var table, const std::vector<int>& ids) {
  const Mat& t = value(table);
  Node n;
  n.value.resize(t.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t b = 0; b < ids.size(); ++b) {
    if (ids[b] < 0 || ids[b] >= t.cols())
      throw ShapeError("lookup: id " + std::to_string(ids[b]) +
                       " outside table with " + std::to_string(t.cols()) +
                       " columns");
    n.value.col(static_cast<Eigen::Index>(b)) = t.col(ids[b]);
  }
  n.needs_grad = wants(table);
  n.back = [table, ids](Tape& tp, const Mat& g) {
    if (!tp.wants(table)) return;
    Mat& gt = tp.grad_buf(table);
    for (std::size_t b = 0; b < ids.size(); ++b)
      gt.col(ids[b]) += g.col(static_cast<Eigen::Index>(b));
  };
  return {push(std::move(n))};
}

Var Tape::matmul(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: " + std::to_string(av.rows()) + "x" +
                     std::to_string(av.cols()) + " * " +
                     std::to_string(bv.rows()) + "x" +
                     std::to_string(bv.cols()));
  Node n;
  n.value = av * bv;
  n.needs_grad = wants(a) || wants(b);
  n.back = [a, b](Tape& tp, const Mat& g) {
    if (tp.wants(a)) tp.grad_buf(a) += g * tp.value(b).transpose();
    if (tp.wants(b)) tp.grad_buf(b) += tp.value(a).transpose() * g;
  };
  return {push(std::move(n))};
}

Var Tape::add(Var a, Var b) {
  Node n;
  n.value = value(a) + value(b);
  n.needs_grad = wants(a) || wants(b);
  n.back = [a, b](Tape& tp, const Mat& g) {
    tp.acc(a, g);
    tp.acc(b, g);
  };
  return {push(std::move(n))};
}

Var Tape::sub(Var a, Var b) {
  Node n;
  n.value = value(a) - value(b);
  n.needs_grad = wants(a) || wants(b);
  n.back = [a, b](Tape& tp, const Mat& g) {
    tp.acc(a, g);
    if (tp.wants(b)) tp.grad_buf(b) -= g;
  };
  return {push(std::move(n))};
}

Var Tape::hadamard(Var a, Var b) {
  Node n;
  n.value = value(a).cwiseProduct(value(b));
  n.needs_grad = wants(a) || wants(b);
  n.back = [a, b](Tape& tp, const Mat& g) {
    if (tp.wants(a)) tp.grad_buf(a) += g.cwiseProduct(tp.value(b));
    if (tp.wants(b)) tp.grad_buf(b) += g.cwiseProduct(tp.value(a));
  };
  return {push(std::move(n))};
}

Var Tape::scale(Var x, double c) {
  Node n;
  n.value = value(x) * c;
  n.needs_grad = wants(x);
  n.back = [x, c](Tape& tp, const Mat& g) { tp.acc(x, g * c); };
  return {push(std::move(n))};
}

Var Tape::add_bias(Var x, Var bias) {
  const Mat& xv = value(x);
  const Mat& bv = value(bias);
  if (bv.cols() != 1 || bv.rows() != xv.rows())
    throw ShapeError("add_bias: bias must be rows x 1");
  Node n;
  n.value = xv.colwise() + bv.col(0);
  n.needs_grad = wants(x) || wants(bias);
  n.back = [x, bias](Tape& tp, const Mat& g) {
    tp.acc(x, g);
    if (tp.wants(bias)) tp.grad_buf(bias).col(0) += g.rowwise().sum();
  };
  return {push(std::move(n))};
}

Var Tape::relu(Var x) {
  Node n;
  n.value = value(x).cwiseMax(0.0);
  n.needs_grad = wants(x);
  n.back = [x](Tape& tp, const Mat& g) {
    if (!tp.wants(x)) return;
    tp.grad_buf(x) +=
        g.cwiseProduct((tp.value(x).array() > 0.0).cast<double>().matrix());
  };
  return {push(std::move(n))};
}

Var Tape::sigmoid(Var x) {
  Node n;
  n.value = (1.0 / (1.0 + (-value(x).array()).exp())).matrix();
  n.needs_grad = wants(x);
  const int self = static_cast<int>(nodes_.size());
  n.back = [x, self](Tape& tp, const Mat& g) {
    if (!tp.wants(x)) return;
    const Mat& y = tp.nodes_[self].value;
    tp.grad_buf(x) +=
        g.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  };
  return {push(std::move(n))};
}

Var Tape::tanh(Var x) {
  Node n;
  n.value = value(x).array().tanh().matrix();
  n.needs_grad = wants(x);
  const int self = static_cast<int>(nodes_.size());
  n.back = [x, self](Tape& tp, const Mat& g) {
    if (!tp.wants(x)) return;
    const Mat& y = tp.nodes_[self].value;
    tp.grad_buf(x) += g.cwiseProduct((1.0 - y.array().square()).matrix());
  };
  return {push(std::move(n))};
}

Var Tape::concat_rows(const std::vector<Var>& xs) {
  if (xs.empty()) throw ShapeError("concat_rows: empty input");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(xs[0]).cols();
  for (Var x : xs) {
    if (value(x).cols() != cols)
      throw ShapeError("concat_rows: column mismatch");
    rows += value(x).rows();
  }
  Node n;
  n.value.resize(rows, cols);
  Eigen::Index at = 0;
  for (Var x : xs) {
    n.value.middleRows(at, value(x).rows()) = value(x);
    at += value(x).rows();
  }
  n.needs_grad = std::any_of(xs.begin(), xs.end(),
                             [this](Var x) { return wants(x); });
  n.back = [xs](Tape& tp, const Mat& g) {
    Eigen::Index at = 0;
    for (Var x : xs) {
      const Eigen::Index r = tp.value(x).rows();
      if (tp.wants(x)) tp.grad_buf(x) += g.middleRows(at, r);
      at += r;
    }
  };
  return {push(std::move(n))};
}

Var Tape::row(Var x, int r) {
  const Mat& xv = value(x);
  if (r < 0 || r >= xv.rows()) throw ShapeError("row: index out of range");
  Node n;
  n.value = xv.row(r);
  n.needs_grad = wants(x);
  n.back = [x, r](Tape& tp, const Mat& g) {
    if (tp.wants(x)) tp.grad_buf(x).row(r) += g.row(0);
  };
  return {push(std::move(n))};
}

Var Tape::colwise_scale(Var x, Var s) {
  const Mat& xv = value(x);
  const Mat& sv = value(s);
  if (sv.rows() != 1 || sv.cols() != xv.cols())
    throw ShapeError("colwise_scale: scale must be 1 x cols");
  Node n;
  n.value = xv.array().rowwise() * sv.array().row(0);
  n.needs_grad = wants(x) || wants(s);
  n.back = [x, s](Tape& tp, const Mat& g) {
    if (tp.wants(x))
      tp.grad_buf(x) +=
          (g.array().rowwise() * tp.value(s).array().row(0)).matrix();
    if (tp.wants(s))
      tp.grad_buf(s).row(0) +=
          g.cwiseProduct(tp.value(x)).colwise().sum();
  };
  return {push(std::move(n))};
}

Var Tape::masked_max(const std::vector<Var>& xs,
                     const std::vector<std::vector<char>>& valid) {
  if (xs.empty()) throw ShapeError("masked_max: empty input");
  if (valid.size() != xs.size())
    throw ShapeError("masked_max: validity mask size mismatch");
  const Eigen::Index rows = value(xs[0]).rows();
  const Eigen::Index cols = value(xs[0]).cols();
  Node n;
  n.value = Mat::Zero(rows, cols);
  // argmax[r + c*rows] = index into xs, or -1 when no position is valid.
  std::vector<int> argmax(static_cast<std::size_t>(rows * cols), -1);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Mat& xv = value(xs[t]);
    if (xv.rows() != rows || xv.cols() != cols)
      throw ShapeError("masked_max: shape mismatch across positions");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!valid[t][static_cast<std::size_t>(c)]) continue;
      for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t k = static_cast<std::size_t>(r + c * rows);
        if (argmax[k] < 0 || xv(r, c) > n.value(r, c)) {
          n.value(r, c) = xv(r, c);
          argmax[k] = static_cast<int>(t);
        }
      }
    }
  }
  n.needs_grad = std::any_of(xs.begin(), xs.end(),
                             [this](Var x) { return wants(x); });
  n.back = [xs, argmax, rows, cols](Tape& tp, const Mat& g) {
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) {
        const int t = argmax[static_cast<std::size_t>(r + c * rows)];
        if (t < 0) continue;
        if (tp.wants(xs[static_cast<std::size_t>(t)]))
          tp.grad_buf(xs[static_cast<std::size_t>(t)])(r, c) += g(r, c);
      }
  };
  return {push(std::move(n))};
}

Var Tape::masked_softmax_cols(Var scores, const std::vector<int>& lengths) {
  const Mat& sv = value(scores);
  if (static_cast<Eigen::Index>(lengths.size()) != sv.cols())
    throw ShapeError("masked_softmax_cols: lengths size mismatch");
  Node n;
  n.value = Mat::Zero(sv.rows(), sv.cols());
  for (Eigen::Index c = 0; c < sv.cols(); ++c) {
    const int len = std::min<int>(lengths[static_cast<std::size_t>(c)],
                                  static_cast<int>(sv.rows()));
    if (len <= 0) continue;
    const double mx = sv.col(c).head(len).maxCoeff();
    Eigen::VectorXd e = (sv.col(c).head(len).array() - mx).exp();
    n.value.col(c).head(len) = e / e.sum();
  }
  n.needs_grad = wants(scores);
  const int self = static_cast<int>(nodes_.size());
  n.back = [scores, lengths, self](Tape& tp, const Mat& g) {
    if (!tp.wants(scores)) return;
    const Mat& p = tp.nodes_[self].value;
    Mat& gs = tp.grad_buf(scores);
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const int len = std::min<int>(lengths[static_cast<std::size_t>(c)],
                                    static_cast<int>(p.rows()));
      if (len <= 0) continue;
      const double dot = p.col(c).head(len).dot(g.col(c).head(len));
      gs.col(c).head(len) +=
          p.col(c).head(len).cwiseProduct(
              (g.col(c).head(len).array() - dot).matrix());
    }
  };
  return {push(std::move(n))};
}

Var Tape::softmax_cols(Var logits) {
  const Mat& lv = value(logits);
  Node n;
  n.value.resize(lv.rows(), lv.cols());
  for (Eigen::Index c = 0; c < lv.cols(); ++c) {
    const double mx = lv.col(c).maxCoeff();
    Eigen::VectorXd e = (lv.col(c).array() - mx).exp();
    n.value.col(c) = e / e.sum();
  }
  n.needs_grad = wants(logits);
  const int self = static_cast<int>(nodes_.size());
  n.back = [logits, self](Tape& tp, const Mat& g) {
    if (!tp.wants(logits)) return;
    const Mat& p = tp.nodes_[self].value;
    Mat& gl = tp.grad_buf(logits);
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const double dot = p.col(c).dot(g.col(c));
      gl.col(c) += p.col(c).cwiseProduct((g.col(c).array() - dot).matrix());
    }
  };
  return {push(std::move(n))};
}

Var Tape::dropout(Var x, double p, Rng& rng, bool training) {
  if (!training || p <= 0.0) return x;
  const Mat& xv = value(x);
  Mat mask(xv.rows(), xv.cols());
  const double keep = 1.0 - p;
  for (Eigen::Index c = 0; c < xv.cols(); ++c)
    for (Eigen::Index r = 0; r < xv.rows(); ++r)
      mask(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  Node n;
  n.value = xv.cwiseProduct(mask);
  n.needs_grad = wants(x);
  n.back = [x, mask](Tape& tp, const Mat& g) {
    tp.acc(x, g.cwiseProduct(mask));
  };
  return {push(std::move(n))};
}

Var Tape::grad_reverse(Var x, double lambda) {
  Node n;
  n.value = value(x);
  n.needs_grad = wants(x);
  n.back = [x, lambda](Tape& tp, const Mat& g) { tp.acc(x, -lambda * g); };
  return {push(std::move(n))};
}

Var Tape::cross_entropy(Var logits, const std::vector<int>& labels,
                        const std::vector<double>& weights) {
  const Mat& lv = value(logits);
  const Eigen::Index B = lv.cols();
  if (static_cast<Eigen::Index>(labels.size()) != B)
    throw ShapeError("cross_entropy: labels size mismatch");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != B)
    throw ShapeError("cross_entropy: weights size mismatch");
  Mat probs(lv.rows(), lv.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < B; ++c) {
    const int y = labels[static_cast<std::size_t>(c)];
    if (y < 0 || y >= lv.rows())
      throw ShapeError("cross_entropy: label out of range");
    const double mx = lv.col(c).maxCoeff();
    Eigen::VectorXd e = (lv.col(c).array() - mx).exp();
    const double lse = mx + std::log(e.sum());
    probs.col(c) = e / e.sum();
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(c)];
    total += w * (lse - lv(y, c));
  }
  Node n;
  n.value = Mat::Constant(1, 1, total / static_cast<double>(B));
  n.needs_grad = wants(logits);
  n.back = [logits, labels, weights, probs, B](Tape& tp, const Mat& g) {
    if (!tp.wants(logits)) return;
    Mat& gl = tp.grad_buf(logits);
    const double s = g(0, 0) / static_cast<double>(B);
    for (Eigen::Index c = 0; c < B; ++c) {
      const double w =
          weights.empty() ? 1.0 : weights[static_cast<std::size_t>(c)];
      gl.col(c) += (s * w) * probs.col(c);
      gl(labels[static_cast<std::size_t>(c)], c) -= s * w;
    }
  };
  return {push(std::move(n))};
}

void Tape::backward(Var loss) {
  const Mat& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ShapeError("backward: loss must be scalar");
  for (Node& n : nodes_) n.touched = false;
  grad_buf(loss)(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.touched || !n.needs_grad) continue;
    if (n.sink != nullptr)
      n.sink->grad += n.grad;
    else if (n.back)
      n.back(*this, n.grad);
  }
}

}  // namespace fairtext::nn
