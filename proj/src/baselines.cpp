#include "fairtext/baselines.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fairtext/error.hpp"
#include "fairtext/rng.hpp"

namespace fairtext {

std::vector<Example> data_augmentation(const std::vector<Example>& train,
                                       const std::vector<Example>& reserve,
                                       std::uint64_t seed) {
  std::array<std::array<long, 2>, 2> count{};  // [z][y]
  for (const Example& ex : train)
    ++count[static_cast<std::size_t>(ex.z)][static_cast<std::size_t>(ex.y)];

  std::vector<Example> out = train;
  Rng rng(seed);
  for (int z : {0, 1}) {
    const long pos = count[static_cast<std::size_t>(z)][1];
    const long neg = count[static_cast<std::size_t>(z)][0];
    if (pos == neg) continue;
    const int y_needed = pos < neg ? 1 : 0;
    const long deficit = std::abs(pos - neg);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < reserve.size(); ++i)
      if (reserve[i].z == z && reserve[i].y == y_needed) candidates.push_back(i);
    if (static_cast<long>(candidates.size()) < deficit)
      throw CapacityError("data_augmentation: need " + std::to_string(deficit) +
                          " reserve examples for cell (y=" +
                          std::to_string(y_needed) + ",z=" + std::to_string(z) +
                          "), have " + std::to_string(candidates.size()));
    rng.shuffle(candidates);
    for (long i = 0; i < deficit; ++i)
      out.push_back(reserve[candidates[static_cast<std::size_t>(i)]]);
  }
  return out;
}

std::vector<double> instance_weight_values(const std::vector<Example>& train) {
  if (train.empty()) throw ConfigError("instance_weights: empty training set");
  std::array<std::array<long, 2>, 2> cell{};  // [z][y]
  std::array<long, 2> label_count{};
  std::array<long, 2> group_count{};
  for (const Example& ex : train) {
    ++cell[static_cast<std::size_t>(ex.z)][static_cast<std::size_t>(ex.y)];
    ++label_count[static_cast<std::size_t>(ex.y)];
    ++group_count[static_cast<std::size_t>(ex.z)];
  }
  for (int z : {0, 1})
    for (int y : {0, 1})
      if (cell[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)] == 0)
        throw ConfigError("instance_weights: empty cell (y=" + std::to_string(y) +
                          ",z=" + std::to_string(z) + ")");

  const double n = static_cast<double>(train.size());
  // w(y,z) = P(y) / P(y|z) = (count(y)/n) / (count(y,z)/count(z)).
  std::array<std::array<double, 2>, 2> w{};
  for (int z : {0, 1})
    for (int y : {0, 1})
      w[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)] =
          (static_cast<double>(label_count[static_cast<std::size_t>(y)]) / n) /
          (static_cast<double>(
               cell[static_cast<std::size_t>(z)][static_cast<std::size_t>(y)]) /
           static_cast<double>(group_count[static_cast<std::size_t>(z)]));

  std::vector<double> out;
  out.reserve(train.size());
  for (const Example& ex : train)
    out.push_back(
        w[static_cast<std::size_t>(ex.z)][static_cast<std::size_t>(ex.y)]);
  return out;
}

std::vector<WeightedExample> instance_weights(const std::vector<Example>& train) {
  const std::vector<double> values = instance_weight_values(train);
  std::vector<WeightedExample> out;
  out.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    out.push_back({train[i], values[i]});
  return out;
}

ClassifierModel train_weighted(const std::vector<EncodedExample>& train,
                               const std::vector<double>& weights,
                               const std::vector<EncodedExample>& val,
                               const ClassifierConfig& cfg, int vocab_size,
                               std::uint64_t seed, TrainLog* log) {
  return train_classifier(train, val, cfg, vocab_size, seed, log, &weights);
}

void save_weighted_tsv(const std::filesystem::path& path,
                       const std::vector<WeightedExample>& examples) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write corpus file: " + path.string());
  char buf[32];
  for (const WeightedExample& wx : examples) {
    for (std::size_t i = 0; i < wx.example.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << wx.example.tokens[i];
    }
    std::snprintf(buf, sizeof(buf), "%.10g", wx.weight);
    out << '\t' << wx.example.y << '\t' << wx.example.z << '\t' << buf << '\n';
  }
}

}  // namespace fairtext
