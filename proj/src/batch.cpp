#include "fairtext/batch.hpp"

#include <algorithm>

#include "fairtext/error.hpp"

namespace fairtext {

Batch make_batch(const std::vector<EncodedExample>& data,
                 const std::vector<std::size_t>& indices, int min_len,
                 const std::vector<double>* weights) {
  if (indices.empty()) throw ShapeError("make_batch: empty index list");
  int longest = 0;
  for (std::size_t i : indices)
    longest = std::max(longest, data[i].length);
  const int L = std::max(std::max(longest, min_len), 1);

  Batch b;
  const int B = static_cast<int>(indices.size());
  b.ids.assign(static_cast<std::size_t>(L),
               std::vector<int>(static_cast<std::size_t>(B), Vocabulary::kPadId));
  b.lengths.reserve(indices.size());
  for (int col = 0; col < B; ++col) {
    const EncodedExample& ex = data[indices[static_cast<std::size_t>(col)]];
    for (int t = 0; t < std::min(L, static_cast<int>(ex.ids.size())); ++t)
      b.ids[static_cast<std::size_t>(t)][static_cast<std::size_t>(col)] =
          ex.ids[static_cast<std::size_t>(t)];
    b.lengths.push_back(std::min(ex.length, L));
    b.y.push_back(ex.y);
    b.z.push_back(ex.z);
    b.weights.push_back(weights ? (*weights)[indices[static_cast<std::size_t>(col)]]
                                : 1.0);
    b.dataset_index.push_back(indices[static_cast<std::size_t>(col)]);
  }
  return b;
}

static std::vector<Batch> batches_from_order(
    const std::vector<EncodedExample>& data, const std::vector<std::size_t>& order,
    int batch_size, int min_len, const std::vector<double>* weights) {
  std::vector<Batch> out;
  for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), at + static_cast<std::size_t>(batch_size));
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(at),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(make_batch(data, idx, min_len, weights));
  }
  return out;
}

std::vector<Batch> make_batches(const std::vector<EncodedExample>& data,
                                int batch_size, int min_len,
                                const std::vector<double>* weights) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return batches_from_order(data, order, batch_size, min_len, weights);
}

std::vector<Batch> make_batches_shuffled(const std::vector<EncodedExample>& data,
                                         int batch_size, int min_len, Rng& rng,
                                         const std::vector<double>* weights) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  return batches_from_order(data, order, batch_size, min_len, weights);
}

}  // namespace fairtext
