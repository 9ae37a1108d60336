#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fairtext/classifiers.hpp"
#include "fairtext/explainer.hpp"
#include "fairtext/nn/adam.hpp"

namespace fairtext {

// Identity in the forward pass; multiplies gradients by -lambda on the way
// back. Realized by Tape::grad_reverse.
struct GradientReversal {
  double lambda = 1.0;
};

struct DebiasConfig {
  int epochs = 5;  // fixed budget; no early stopping (validation data trains)
  int batch_size = 64;
  GradientReversal reversal;
  double xi = 0.0;  // inner step size; only the first-order setting (0) is built

  void validate() const;
};

struct DebiasSettings {
  ClassifierConfig classifier;  // main and adversarial classifiers
  ExplainerConfig corrector;    // same architecture family as the explainer
  DebiasConfig debias;
};

// Parameter groups and their optimizers for the bi-level scheme:
//   theta (corrector, incl. its embedding)  <- validation loss
//   w_y   (main classifier + the shared input embedding) <- task training loss
//   w_z   (adversarial classifier, behind the reversal)  <- group training loss
// The three groups are disjoint; each optimizer owns exactly one group.
class DebiasState {
 public:
  DebiasState(const DebiasSettings& settings, int vocab_size, std::uint64_t seed);

  SaliencyModel& corrector() { return *corrector_; }
  ClassifierModel& main() { return *main_; }
  ClassifierModel& adversary() { return *adversary_; }
  const SaliencyModel& corrector() const { return *corrector_; }
  const ClassifierModel& main() const { return *main_; }
  const ClassifierModel& adversary() const { return *adversary_; }

  nn::AdamOptimizer& opt_theta() { return *opt_theta_; }
  nn::AdamOptimizer& opt_wy() { return *opt_wy_; }
  nn::AdamOptimizer& opt_wz() { return *opt_wz_; }

  const DebiasSettings& settings() const { return settings_; }
  Rng& dropout_rng() { return dropout_rng_; }
  long steps_done() const { return steps_; }
  void count_step() { ++steps_; }

 private:
  DebiasSettings settings_;
  std::unique_ptr<SaliencyModel> corrector_;
  std::unique_ptr<ClassifierModel> main_;
  std::unique_ptr<ClassifierModel> adversary_;
  std::unique_ptr<nn::AdamOptimizer> opt_theta_, opt_wy_, opt_wz_;
  Rng dropout_rng_;
  long steps_ = 0;
};

struct DebiasedForward {
  nn::Mat y_probs;  // (2 x B)
  nn::Mat z_probs;  // (2 x B)
  std::vector<SaliencyDistribution> saliency;
};

// Inference-mode pass through corrector -> X_S -> both classifiers.
DebiasedForward forward_debiased(const DebiasState& state, const Batch& batch);

// Sub-step (a): descend theta on L^Y + L^Z over the validation batch; the
// classifier weights receive nothing. First-order scheme: no inner virtual
// step on W before the theta gradient.
void darts_theta_step(DebiasState& state, const Batch& val_batch);
// Sub-step (b): recompute S with the current theta on the training batch and
// descend W^Y on L^Y and W^Z on L^Z; theta receives nothing.
void darts_w_step(DebiasState& state, const Batch& train_batch);
// One alternating update: (a) then (b).
void darts_step(DebiasState& state, const Batch& train_batch,
                const Batch& val_batch);

// Final predictor: corrector + main classifier; the adversary is dropped.
struct DebiasedModel {
  SaliencyModel corrector;
  ClassifierModel main;

  nn::Mat predict_probs(const Batch& batch) const;
  int min_input_len() const { return main.min_input_len(); }
  int batch_size() const { return main.config().batch_size; }
};

EvalResult evaluate_debiased(const DebiasedModel& model,
                             const std::vector<EncodedExample>& data);

struct DebiasResult {
  DebiasedModel model;
  std::unique_ptr<DebiasState> state;  // retains the adversary
};

// Runs the alternating loop for exactly `epochs` epochs, sampling validation
// batches from the augmented pool V' = V  union  T (shuffled, cycling).
DebiasResult train_debiased(const std::vector<EncodedExample>& train,
                            const std::vector<EncodedExample>& val,
                            const DebiasSettings& settings, int vocab_size,
                            std::uint64_t seed);

}  // namespace fairtext
