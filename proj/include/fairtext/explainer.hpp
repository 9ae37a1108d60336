#pragma once

#include <cstdint>
#include <vector>

#include "fairtext/batch.hpp"
#include "fairtext/classifiers.hpp"
#include "fairtext/nn/gru.hpp"

namespace fairtext {

// Per-token saliency scores for one example: non-negative, exactly zero on
// pad positions, summing to 1 over the `length` real tokens.
struct SaliencyDistribution {
  std::vector<double> scores;  // aligned with (padded) token positions
  int length = 0;

  // Scores over real tokens only.
  std::vector<double> real_scores() const {
    return {scores.begin(), scores.begin() + length};
  }
};

struct ExplainerConfig {
  int embedding_dim = 300;
  int hidden = 150;  // per direction
  double learning_rate = 0.001;
  double grad_clip_value = 0.25;
  int batch_size = 64;
  int early_stop_patience = 5;
  int max_epochs = 100;

  void validate() const;
};

// Saliency network: bi-directional GRU over its own embedding table, a
// position-wise linear score head, and a softmax over real positions.
// Serves both as the post-hoc explainer and as the debiasing corrector.
class SaliencyModel {
 public:
  SaliencyModel(const ExplainerConfig& cfg, int vocab_size, std::uint64_t seed);

  // (L x B) saliency matrix on the tape; each column obeys the
  // SaliencyDistribution invariants.
  nn::Var saliency(nn::Tape& tape, const Batch& batch, nn::Bind mode);

  std::vector<SaliencyDistribution> explain(const Batch& batch) const;
  std::vector<SaliencyDistribution> explain_all(
      const std::vector<EncodedExample>& data) const;

  std::vector<nn::Parameter*> params();
  const ExplainerConfig& config() const { return cfg_; }
  int vocab_size() const { return vocab_size_; }

 private:
  ExplainerConfig cfg_;
  int vocab_size_ = 0;
  nn::Parameter embedding_;
  nn::GruParams fwd_, bwd_;
  nn::Parameter score_w_, score_b_;
};

// X_S = X .* S: scales each position's embedding by its saliency score.
// seq[t] is (D x B); saliency is (L x B). Pad positions end up zero.
std::vector<nn::Var> apply_saliency(nn::Tape& tape,
                                    const std::vector<nn::Var>& seq,
                                    nn::Var saliency);
// Plain-data variant.
std::vector<nn::Mat> apply_saliency(const std::vector<nn::Mat>& seq,
                                    const std::vector<SaliencyDistribution>& sal);

// Trains the explainer against a frozen classifier by minimizing the
// classifier's cross-entropy on X_S (the classifier receives no updates;
// it is taken by const reference and only ever bound frozen).
// Checkpoint selection: lowest validation cross-entropy, patience as in
// classifier training.
SaliencyModel train_explainer(const ClassifierModel& model,
                              const std::vector<EncodedExample>& train,
                              const std::vector<EncodedExample>& val,
                              const ExplainerConfig& cfg, std::uint64_t seed,
                              TrainLog* log = nullptr);

// Mean cross-entropy of the frozen classifier on saliency-weighted inputs.
double weighted_input_cross_entropy(const ClassifierModel& model,
                                    const SaliencyModel& explainer,
                                    const std::vector<EncodedExample>& data);
// Baseline: uniform saliency 1/n over real tokens.
double uniform_input_cross_entropy(const ClassifierModel& model,
                                   const std::vector<EncodedExample>& data);

// Saliency dump: one line per example, "<id>\t<token>:<score> ...", scores
// with six decimals. Tokens are looked up through the vocabulary used at
// encoding time.
std::string saliency_dump(const std::vector<EncodedExample>& data,
                          const std::vector<SaliencyDistribution>& sal,
                          const Vocabulary& vocab);

}  // namespace fairtext
