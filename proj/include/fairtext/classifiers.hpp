#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairtext/batch.hpp"
#include "fairtext/nn/adam.hpp"
#include "fairtext/nn/gru.hpp"
#include "fairtext/nn/tape.hpp"

namespace fairtext {

enum class Arch { CNN, RNN };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);

struct ClassifierConfig {
  Arch arch = Arch::CNN;
  int embedding_dim = 300;
  int cnn_filters = 100;  // per kernel size
  std::vector<int> cnn_kernel_sizes{3, 4, 5};
  double cnn_dropout = 0.3;
  int rnn_hidden = 300;
  double rnn_dropout = 0.2;
  double learning_rate = 0.001;
  double grad_clip_value = 0.25;
  int batch_size = 64;
  int early_stop_patience = 5;  // epochs without validation improvement
  int max_epochs = 100;

  void validate() const;
};

// Binary text classifier over token ids or externally weighted embedding
// sequences. The pad embedding column is pinned to zero, which together
// with masked pooling / state carrying makes predictions independent of
// trailing padding.
class ClassifierModel {
 public:
  ClassifierModel(const ClassifierConfig& cfg, int vocab_size,
                  std::uint64_t seed, bool with_embedding = true);

  // --- tape builders (compose these for custom training objectives) ---
  std::vector<nn::Var> embed(nn::Tape& tape, const Batch& batch, nn::Bind mode);
  nn::Var logits_from_embedded(nn::Tape& tape, const std::vector<nn::Var>& seq,
                               const std::vector<int>& lengths, nn::Bind mode,
                               bool training, Rng* dropout_rng);
  nn::Var logits(nn::Tape& tape, const Batch& batch, nn::Bind mode,
                 bool training, Rng* dropout_rng);

  // --- inference (read-only; each call builds a throwaway frozen graph) ---
  // Probabilities as a (2 x B) matrix; columns sum to 1.
  nn::Mat predict_probs(const Batch& batch) const;
  // Weighted-embedding input: seq[t] is (embedding_dim x B) with pad
  // positions zeroed. Throws ShapeError on dimension mismatch.
  nn::Mat predict_probs_weighted(const std::vector<nn::Mat>& seq,
                                 const std::vector<int>& lengths) const;

  std::vector<nn::Parameter*> params();
  std::vector<nn::Parameter*> encoder_head_params();
  nn::Parameter& embedding();
  bool has_embedding() const { return with_embedding_; }
  // Smallest usable padded length (longest CNN kernel; 1 for RNN).
  int min_input_len() const;

  const ClassifierConfig& config() const { return cfg_; }
  int vocab_size() const { return vocab_size_; }

 private:
  ClassifierConfig cfg_;
  int vocab_size_ = 0;
  bool with_embedding_ = true;
  nn::Parameter embedding_;
  std::vector<nn::Parameter> conv_w_, conv_b_;
  nn::GruParams gru_;
  nn::Parameter head_w_, head_b_;
};

struct EvalResult {
  double accuracy = 0.0;
  double f1 = 0.0;  // positive class
  std::vector<int> predictions;
  std::vector<double> p_positive;
};

// Accuracy and positive-class F1 from confusion counts; F1 is 0 when the
// model never predicts (or the data never contains) the positive class.
std::pair<double, double> accuracy_f1(long tp, long fp, long fn, long tn);

// Argmax decision at 0.5 with ties resolved to the negative class.
EvalResult evaluate(const ClassifierModel& model,
                    const std::vector<EncodedExample>& data);

struct TrainLog {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::vector<double> train_loss;
  std::vector<double> val_accuracy;
};

// Adam + clipping + early stopping on validation accuracy (patience
// `early_stop_patience`); returns the best-validation checkpoint.
// Optional `weights` are per-example loss multipliers aligned with `train`.
ClassifierModel train_classifier(const std::vector<EncodedExample>& train,
                                 const std::vector<EncodedExample>& val,
                                 const ClassifierConfig& cfg, int vocab_size,
                                 std::uint64_t seed, TrainLog* log = nullptr,
                                 const std::vector<double>* weights = nullptr);

}  // namespace fairtext
