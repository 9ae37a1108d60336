#pragma once

// Independent oracles for derived expected values. Nothing here touches the
// tape/model implementation paths it is used to check.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fairtext/corpus.hpp"

namespace oracles {

// Bag-of-words logistic regression, full-batch gradient descent from zero
// weights. Establishes that a task is learnable before any neural result is
// asserted against it.
class BowLogistic {
 public:
  template <typename LabelFn>
  static double train_and_test_accuracy(const std::vector<fairtext::Example>& train,
                                        const std::vector<fairtext::Example>& test,
                                        LabelFn&& label, int iterations = 300,
                                        double lr = 0.5) {
    std::map<std::string, int> feature_index;
    for (const auto& ex : train)
      for (const auto& t : ex.tokens)
        feature_index.emplace(t, static_cast<int>(feature_index.size()));
    const std::size_t dim = feature_index.size() + 1;  // + bias

    auto featurize = [&](const fairtext::Example& ex) {
      std::vector<std::pair<int, double>> feats;
      std::map<int, double> counts;
      for (const auto& t : ex.tokens) {
        auto it = feature_index.find(t);
        if (it != feature_index.end()) counts[it->second] += 1.0;
      }
      feats.assign(counts.begin(), counts.end());
      feats.emplace_back(static_cast<int>(dim) - 1, 1.0);
      return feats;
    };

    std::vector<double> w(dim, 0.0);
    std::vector<std::vector<std::pair<int, double>>> rows;
    rows.reserve(train.size());
    for (const auto& ex : train) rows.push_back(featurize(ex));

    for (int it = 0; it < iterations; ++it) {
      std::vector<double> grad(dim, 0.0);
      for (std::size_t i = 0; i < train.size(); ++i) {
        double score = 0.0;
        for (const auto& [f, v] : rows[i]) score += w[static_cast<std::size_t>(f)] * v;
        const double p = 1.0 / (1.0 + std::exp(-score));
        const double err = p - static_cast<double>(label(train[i]));
        for (const auto& [f, v] : rows[i]) grad[static_cast<std::size_t>(f)] += err * v;
      }
      for (std::size_t d = 0; d < dim; ++d)
        w[d] -= lr * grad[d] / static_cast<double>(train.size());
    }

    long correct = 0;
    for (const auto& ex : test) {
      double score = 0.0;
      for (const auto& [f, v] : featurize(ex)) score += w[static_cast<std::size_t>(f)] * v;
      const int pred = score > 0.0 ? 1 : 0;
      if (pred == label(ex)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
  }
};

// Mutual information (bits) between token presence and a binary attribute,
// estimated from corpus counts. Ranks how revealing each token is.
template <typename LabelFn>
std::map<std::string, double> token_mutual_information(
    const std::vector<fairtext::Example>& corpus, LabelFn&& label) {
  std::map<std::string, std::array<long, 2>> present;  // token -> count per class
  std::array<long, 2> class_count{0, 0};
  for (const auto& ex : corpus) {
    const int c = label(ex);
    ++class_count[static_cast<std::size_t>(c)];
    std::map<std::string, bool> seen;
    for (const auto& t : ex.tokens) seen[t] = true;
    for (const auto& [t, _] : seen) ++present[t][static_cast<std::size_t>(c)];
  }
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, double> mi;
  for (const auto& [token, cnt] : present) {
    double value = 0.0;
    for (int x : {0, 1}) {  // token absent / present
      for (int c : {0, 1}) {
        const double n_xc =
            x == 1 ? static_cast<double>(cnt[static_cast<std::size_t>(c)])
                   : static_cast<double>(class_count[static_cast<std::size_t>(c)] -
                                         cnt[static_cast<std::size_t>(c)]);
        if (n_xc <= 0.0) continue;
        const double p_xc = n_xc / n;
        const double p_x =
            x == 1 ? static_cast<double>(cnt[0] + cnt[1]) / n
                   : 1.0 - static_cast<double>(cnt[0] + cnt[1]) / n;
        const double p_c = static_cast<double>(class_count[static_cast<std::size_t>(c)]) / n;
        value += p_xc * std::log2(p_xc / (p_x * p_c));
      }
    }
    mi[token] = value;
  }
  return mi;
}

// Spearman rank correlation for small series (midrank ties).
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double below = 0.0, equal = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++below;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = below + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

}  // namespace oracles
