#include "fairtext/debiaser.hpp"

#include <cmath>

#include "fairtext/error.hpp"

namespace fairtext {

void DebiasConfig::validate() const {
  if (epochs < 1) throw ConfigError("debias epochs must be >= 1");
  if (batch_size <= 0) throw ConfigError("debias batch_size must be positive");
  if (reversal.lambda <= 0.0) throw ConfigError("reversal lambda must be positive");
  if (xi < 0.0) throw ConfigError("xi must be non-negative");
  if (xi > 0.0)
    throw ConfigError("xi > 0 (second-order scheme) is not supported; use 0");
}

DebiasState::DebiasState(const DebiasSettings& settings, int vocab_size,
                         std::uint64_t seed)
    : settings_(settings), dropout_rng_(stage_seed(seed, "dropout")) {
  settings_.debias.validate();
  corrector_ = std::make_unique<SaliencyModel>(settings_.corrector, vocab_size,
                                               stage_seed(seed, "corrector"));
  main_ = std::make_unique<ClassifierModel>(settings_.classifier, vocab_size,
                                            stage_seed(seed, "main"));
  // The adversary reads the already-embedded X_S, so it carries no
  // embedding table of its own.
  adversary_ = std::make_unique<ClassifierModel>(
      settings_.classifier, vocab_size, stage_seed(seed, "adversary"), false);

  opt_theta_ = std::make_unique<nn::AdamOptimizer>(
      corrector_->params(), settings_.corrector.learning_rate,
      settings_.corrector.grad_clip_value);
  opt_wy_ = std::make_unique<nn::AdamOptimizer>(
      main_->params(), settings_.classifier.learning_rate,
      settings_.classifier.grad_clip_value);
  opt_wz_ = std::make_unique<nn::AdamOptimizer>(
      adversary_->params(), settings_.classifier.learning_rate,
      settings_.classifier.grad_clip_value);
}

namespace {

struct ForwardVars {
  nn::Var saliency;
  nn::Var logits_y;
  nn::Var logits_z;
};

// corrector -> S; X_S = embed(X) .* S; M^Y(X_S); M^Z(reverse(X_S)).
ForwardVars build_forward(nn::Tape& tape, DebiasState& state, const Batch& batch,
                          nn::Bind bind_theta, nn::Bind bind_w, bool training,
                          Rng* dropout_rng) {
  ForwardVars f;
  f.saliency = state.corrector().saliency(tape, batch, bind_theta);
  auto embedded = state.main().embed(tape, batch, bind_w);
  auto xs = apply_saliency(tape, embedded, f.saliency);
  f.logits_y = state.main().logits_from_embedded(
      tape, xs, batch.lengths, bind_w, training, dropout_rng);
  std::vector<nn::Var> reversed;
  reversed.reserve(xs.size());
  const double lambda = state.settings().debias.reversal.lambda;
  for (nn::Var v : xs) reversed.push_back(tape.grad_reverse(v, lambda));
  f.logits_z = state.adversary().logits_from_embedded(
      tape, reversed, batch.lengths, bind_w, training, dropout_rng);
  return f;
}

}  // namespace

DebiasedForward forward_debiased(const DebiasState& state, const Batch& batch) {
  auto& s = const_cast<DebiasState&>(state);  // frozen bind only
  nn::Tape tape;
  ForwardVars f = build_forward(tape, s, batch, nn::Bind::Frozen,
                                nn::Bind::Frozen, false, nullptr);
  DebiasedForward out;
  out.y_probs = tape.value(tape.softmax_cols(f.logits_y));
  out.z_probs = tape.value(tape.softmax_cols(f.logits_z));
  const nn::Mat& sal = tape.value(f.saliency);
  out.saliency.reserve(static_cast<std::size_t>(batch.size()));
  for (int col = 0; col < batch.size(); ++col) {
    SaliencyDistribution d;
    d.length = batch.lengths[static_cast<std::size_t>(col)];
    d.scores.resize(static_cast<std::size_t>(sal.rows()));
    for (Eigen::Index t = 0; t < sal.rows(); ++t)
      d.scores[static_cast<std::size_t>(t)] = sal(t, col);
    out.saliency.push_back(std::move(d));
  }
  return out;
}

void darts_theta_step(DebiasState& state, const Batch& val_batch) {
  nn::Tape tape;
  ForwardVars f = build_forward(tape, state, val_batch, nn::Bind::Trainable,
                                nn::Bind::Frozen, true, &state.dropout_rng());
  nn::Var ly = tape.cross_entropy(f.logits_y, val_batch.y);
  nn::Var lz = tape.cross_entropy(f.logits_z, val_batch.z);
  nn::Var loss = tape.add(ly, lz);
  if (!std::isfinite(tape.value(loss)(0, 0)))
    throw TrainingError("non-finite validation loss at debias step " +
                        std::to_string(state.steps_done() + 1));
  state.opt_theta().zero_grad();
  tape.backward(loss);
  state.opt_theta().step();
}

void darts_w_step(DebiasState& state, const Batch& train_batch) {
  nn::Tape tape;
  ForwardVars f = build_forward(tape, state, train_batch, nn::Bind::Frozen,
                                nn::Bind::Trainable, true, &state.dropout_rng());
  nn::Var ly = tape.cross_entropy(f.logits_y, train_batch.y);
  nn::Var lz = tape.cross_entropy(f.logits_z, train_batch.z);
  if (!std::isfinite(tape.value(ly)(0, 0)) ||
      !std::isfinite(tape.value(lz)(0, 0)))
    throw TrainingError("non-finite training loss at debias step " +
                        std::to_string(state.steps_done() + 1));
  // W^Y descends only the task loss: the reversed group-loss gradient into
  // the shared embedding must not leak into this update, so each optimizer
  // runs strictly after its own backward pass.
  state.opt_wy().zero_grad();
  state.opt_wz().zero_grad();
  tape.backward(ly);
  state.opt_wy().step();
  tape.backward(lz);
  state.opt_wz().step();
}

void darts_step(DebiasState& state, const Batch& train_batch,
                const Batch& val_batch) {
  darts_theta_step(state, val_batch);
  darts_w_step(state, train_batch);
  state.count_step();
}

nn::Mat DebiasedModel::predict_probs(const Batch& batch) const {
  auto& c = const_cast<SaliencyModel&>(corrector);
  auto& m = const_cast<ClassifierModel&>(main);
  nn::Tape tape;
  nn::Var s = c.saliency(tape, batch, nn::Bind::Frozen);
  auto xs = apply_saliency(tape, m.embed(tape, batch, nn::Bind::Frozen), s);
  nn::Var lg = m.logits_from_embedded(tape, xs, batch.lengths, nn::Bind::Frozen,
                                      false, nullptr);
  return tape.value(tape.softmax_cols(lg));
}

EvalResult evaluate_debiased(const DebiasedModel& model,
                             const std::vector<EncodedExample>& data) {
  EvalResult res;
  res.predictions.resize(data.size());
  res.p_positive.resize(data.size());
  if (data.empty()) return res;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (const Batch& batch :
       make_batches(data, model.batch_size(), model.min_input_len())) {
    const nn::Mat probs = model.predict_probs(batch);
    for (int col = 0; col < batch.size(); ++col) {
      const std::size_t i = batch.dataset_index[static_cast<std::size_t>(col)];
      const double p1 = probs(1, col);
      const int pred = p1 > 0.5 ? 1 : 0;
      res.predictions[i] = pred;
      res.p_positive[i] = p1;
      const int y = batch.y[static_cast<std::size_t>(col)];
      if (pred == 1 && y == 1) ++tp;
      if (pred == 1 && y == 0) ++fp;
      if (pred == 0 && y == 1) ++fn;
      if (pred == 0 && y == 0) ++tn;
    }
  }
  std::tie(res.accuracy, res.f1) = accuracy_f1(tp, fp, fn, tn);
  return res;
}

DebiasResult train_debiased(const std::vector<EncodedExample>& train,
                            const std::vector<EncodedExample>& val,
                            const DebiasSettings& settings, int vocab_size,
                            std::uint64_t seed) {
  settings.debias.validate();
  if (train.empty() || val.empty()) throw ConfigError("train_debiased: empty split");

  auto state = std::make_unique<DebiasState>(settings, vocab_size,
                                             stage_seed(seed, "init"));
  const int min_len = state->main().min_input_len();
  const int batch_size = settings.debias.batch_size;

  // Augmented validation pool V' = V union T.
  std::vector<EncodedExample> vprime = val;
  vprime.insert(vprime.end(), train.begin(), train.end());
  Rng vprime_rng(stage_seed(seed, "vprime"));
  std::vector<Batch> val_batches;
  std::size_t val_at = 0;
  auto next_val_batch = [&]() -> Batch {
    if (val_at >= val_batches.size()) {
      val_batches = make_batches_shuffled(vprime, batch_size, min_len, vprime_rng);
      val_at = 0;
    }
    return val_batches[val_at++];
  };

  Rng shuffle_rng(stage_seed(seed, "shuffle"));
  for (int epoch = 1; epoch <= settings.debias.epochs; ++epoch) {
    for (const Batch& train_batch :
         make_batches_shuffled(train, batch_size, min_len, shuffle_rng)) {
      const Batch val_batch = next_val_batch();
      darts_step(*state, train_batch, val_batch);
    }
  }

  DebiasResult result{DebiasedModel{state->corrector(), state->main()},
                      std::move(state)};
  return result;
}

}  // namespace fairtext
