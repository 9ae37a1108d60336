#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fairtext/classifiers.hpp"
#include "fairtext/corpus.hpp"

namespace fairtext {

struct WeightedExample {
  Example example;
  double weight = 1.0;
};

// Rebalances each group to a 1:1 label ratio by adding examples from the
// reserve pool (examples unused by any split). Original examples are all
// retained; throws CapacityError when the reserve cannot cover a deficit.
std::vector<Example> data_augmentation(const std::vector<Example>& train,
                                       const std::vector<Example>& reserve,
                                       std::uint64_t seed);

// Weight P(Y)/P(Y|Z) per example, with both distributions estimated by
// exact frequency counting over the training set. Every (y, z) cell must be
// non-empty. All examples in a cell share one weight.
std::vector<WeightedExample> instance_weights(const std::vector<Example>& train);

// The same weights aligned with the input order, for feeding the trainer.
std::vector<double> instance_weight_values(const std::vector<Example>& train);

// Identical to train_classifier except each example's cross-entropy term is
// multiplied by its weight.
ClassifierModel train_weighted(const std::vector<EncodedExample>& train,
                               const std::vector<double>& weights,
                               const std::vector<EncodedExample>& val,
                               const ClassifierConfig& cfg, int vocab_size,
                               std::uint64_t seed, TrainLog* log = nullptr);

// TSV with a fourth weight column.
void save_weighted_tsv(const std::filesystem::path& path,
                       const std::vector<WeightedExample>& examples);

}  // namespace fairtext
