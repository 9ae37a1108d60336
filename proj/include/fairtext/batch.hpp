#pragma once

#include <vector>

#include "fairtext/corpus.hpp"
#include "fairtext/rng.hpp"

namespace fairtext {

// Mini-batch of encoded examples, trimmed to the longest real sequence in
// the batch (but at least min_len positions, so convolution windows exist).
// Positions at and past an example's length hold the pad id.
struct Batch {
  std::vector<std::vector<int>> ids;  // [position][example]
  std::vector<int> lengths;
  std::vector<int> y;
  std::vector<int> z;
  std::vector<double> weights;            // per-example loss weights
  std::vector<std::size_t> dataset_index;  // position in the source dataset

  int size() const { return static_cast<int>(lengths.size()); }
  int padded_len() const { return static_cast<int>(ids.size()); }
};

Batch make_batch(const std::vector<EncodedExample>& data,
                 const std::vector<std::size_t>& indices, int min_len,
                 const std::vector<double>* weights = nullptr);

// Sequential batches in dataset order (evaluation).
std::vector<Batch> make_batches(const std::vector<EncodedExample>& data,
                                int batch_size, int min_len,
                                const std::vector<double>* weights = nullptr);

// Shuffled batches for one training epoch.
std::vector<Batch> make_batches_shuffled(const std::vector<EncodedExample>& data,
                                         int batch_size, int min_len, Rng& rng,
                                         const std::vector<double>* weights = nullptr);

}  // namespace fairtext
