#include "fairtext/explainer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fairtext/error.hpp"
#include "fairtext/nn/adam.hpp"

namespace fairtext {

void ExplainerConfig::validate() const {
  if (embedding_dim <= 0 || hidden <= 0)
    throw ConfigError("explainer dims must be positive");
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (grad_clip_value <= 0.0) throw ConfigError("grad_clip_value must be positive");
  if (batch_size <= 0 || early_stop_patience <= 0 || max_epochs <= 0)
    throw ConfigError("invalid explainer training settings");
}

SaliencyModel::SaliencyModel(const ExplainerConfig& cfg, int vocab_size,
                             std::uint64_t seed)
    : cfg_(cfg), vocab_size_(vocab_size) {
  cfg_.validate();
  if (vocab_size_ <= 0) throw ConfigError("vocab_size must be positive");
  Rng rng(seed);
  embedding_ = nn::Parameter("embedding", cfg_.embedding_dim, vocab_size_);
  embedding_.frozen_col = Vocabulary::kPadId;
  embedding_.init_uniform(rng, -0.1, 0.1);
  fwd_ = nn::GruParams("fwd", cfg_.embedding_dim, cfg_.hidden, rng);
  bwd_ = nn::GruParams("bwd", cfg_.embedding_dim, cfg_.hidden, rng);
  score_w_ = nn::Parameter("score.w", 1, 2 * cfg_.hidden);
  score_w_.init_xavier(rng);
  score_b_ = nn::Parameter("score.b", 1, 1);
}

std::vector<nn::Parameter*> SaliencyModel::params() {
  std::vector<nn::Parameter*> out{&embedding_};
  for (nn::Parameter* p : fwd_.params()) out.push_back(p);
  for (nn::Parameter* p : bwd_.params()) out.push_back(p);
  out.push_back(&score_w_);
  out.push_back(&score_b_);
  return out;
}

nn::Var SaliencyModel::saliency(nn::Tape& tape, const Batch& batch,
                                nn::Bind mode) {
  nn::Var table = nn::bind(tape, embedding_, mode);
  std::vector<nn::Var> seq;
  seq.reserve(batch.ids.size());
  for (const auto& ids_t : batch.ids) seq.push_back(tape.lookup(table, ids_t));

  nn::GruVars fg = nn::bind_gru(tape, fwd_, mode);
  nn::GruVars bg = nn::bind_gru(tape, bwd_, mode);
  const auto hf = nn::gru_sequence(tape, fg, seq, batch.lengths, cfg_.hidden);
  const auto hb = nn::gru_sequence(tape, bg, seq, batch.lengths, cfg_.hidden, true);

  nn::Var w = nn::bind(tape, score_w_, mode);
  nn::Var b = nn::bind(tape, score_b_, mode);
  std::vector<nn::Var> scores;
  scores.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t)
    scores.push_back(tape.add_bias(
        tape.matmul(w, tape.concat_rows({hf[t], hb[t]})), b));
  // Pad rows are masked inside the softmax, so they come out exactly zero.
  return tape.masked_softmax_cols(tape.concat_rows(scores), batch.lengths);
}

std::vector<SaliencyDistribution> SaliencyModel::explain(const Batch& batch) const {
  auto& self = const_cast<SaliencyModel&>(*this);  // frozen bind only
  nn::Tape tape;
  const nn::Mat s = tape.value(self.saliency(tape, batch, nn::Bind::Frozen));
  std::vector<SaliencyDistribution> out;
  out.reserve(static_cast<std::size_t>(batch.size()));
  for (int col = 0; col < batch.size(); ++col) {
    SaliencyDistribution d;
    d.length = batch.lengths[static_cast<std::size_t>(col)];
    d.scores.resize(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index t = 0; t < s.rows(); ++t)
      d.scores[static_cast<std::size_t>(t)] = s(t, col);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SaliencyDistribution> SaliencyModel::explain_all(
    const std::vector<EncodedExample>& data) const {
  std::vector<SaliencyDistribution> out(data.size());
  for (const Batch& batch : make_batches(data, cfg_.batch_size, 1)) {
    auto sal = explain(batch);
    for (int col = 0; col < batch.size(); ++col)
      out[batch.dataset_index[static_cast<std::size_t>(col)]] =
          std::move(sal[static_cast<std::size_t>(col)]);
  }
  return out;
}

std::vector<nn::Var> apply_saliency(nn::Tape& tape,
                                    const std::vector<nn::Var>& seq,
                                    nn::Var saliency) {
  const nn::Mat& s = tape.value(saliency);
  if (s.rows() != static_cast<Eigen::Index>(seq.size()))
    throw ShapeError("apply_saliency: saliency has " + std::to_string(s.rows()) +
                     " positions for sequence of length " +
                     std::to_string(seq.size()));
  std::vector<nn::Var> out;
  out.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t)
    out.push_back(tape.colwise_scale(seq[t], tape.row(saliency, static_cast<int>(t))));
  return out;
}

std::vector<nn::Mat> apply_saliency(const std::vector<nn::Mat>& seq,
                                    const std::vector<SaliencyDistribution>& sal) {
  std::vector<nn::Mat> out;
  out.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) {
    nn::Mat m = seq[t];
    if (!sal.empty() && sal[0].scores.size() != seq.size())
      throw ShapeError("apply_saliency: length mismatch");
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      if (sal[static_cast<std::size_t>(col)].scores.size() != seq.size())
        throw ShapeError("apply_saliency: length mismatch");
      m.col(col) *= sal[static_cast<std::size_t>(col)].scores[t];
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

// Frozen-classifier cross-entropy on weighted inputs, with the saliency
// matrix supplied per batch.
template <typename SaliencyFn>
double ce_on_weighted(const ClassifierModel& model,
                      const std::vector<EncodedExample>& data, SaliencyFn&& fn) {
  auto& m = const_cast<ClassifierModel&>(model);
  double total = 0.0;
  for (const Batch& batch : make_batches(data, model.config().batch_size,
                                         model.min_input_len())) {
    nn::Tape tape;
    nn::Var s = fn(tape, batch);
    auto xs = apply_saliency(tape, m.embed(tape, batch, nn::Bind::Frozen), s);
    nn::Var lg = m.logits_from_embedded(tape, xs, batch.lengths,
                                        nn::Bind::Frozen, false, nullptr);
    nn::Var ce = tape.cross_entropy(lg, batch.y);
    total += tape.value(ce)(0, 0) * batch.size();
  }
  return total / static_cast<double>(data.size());
}

nn::Mat uniform_saliency(const Batch& batch) {
  nn::Mat s = nn::Mat::Zero(batch.padded_len(), batch.size());
  for (int col = 0; col < batch.size(); ++col) {
    const int len = batch.lengths[static_cast<std::size_t>(col)];
    for (int t = 0; t < len; ++t)
      s(t, col) = 1.0 / static_cast<double>(len);
  }
  return s;
}

}  // namespace

double weighted_input_cross_entropy(const ClassifierModel& model,
                                    const SaliencyModel& explainer,
                                    const std::vector<EncodedExample>& data) {
  auto& e = const_cast<SaliencyModel&>(explainer);
  return ce_on_weighted(model, data, [&e](nn::Tape& tape, const Batch& batch) {
    return e.saliency(tape, batch, nn::Bind::Frozen);
  });
}

double uniform_input_cross_entropy(const ClassifierModel& model,
                                   const std::vector<EncodedExample>& data) {
  return ce_on_weighted(model, data, [](nn::Tape& tape, const Batch& batch) {
    return tape.constant(uniform_saliency(batch));
  });
}

SaliencyModel train_explainer(const ClassifierModel& model,
                              const std::vector<EncodedExample>& train,
                              const std::vector<EncodedExample>& val,
                              const ExplainerConfig& cfg, std::uint64_t seed,
                              TrainLog* log) {
  cfg.validate();
  if (train.empty() || val.empty()) throw ConfigError("train_explainer: empty split");
  auto& m = const_cast<ClassifierModel&>(model);  // frozen bind only

  SaliencyModel explainer(cfg, model.vocab_size(), stage_seed(seed, "init"));
  nn::AdamOptimizer opt(explainer.params(), cfg.learning_rate, cfg.grad_clip_value);
  Rng shuffle_rng(stage_seed(seed, "shuffle"));

  std::vector<nn::Mat> best_params;
  double best_ce = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int stale_epochs = 0;
  TrainLog local;
  TrainLog& tl = log ? *log : local;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    long steps = 0;
    for (const Batch& batch : make_batches_shuffled(train, cfg.batch_size,
                                                    m.min_input_len(), shuffle_rng)) {
      nn::Tape tape;
      nn::Var s = explainer.saliency(tape, batch, nn::Bind::Trainable);
      auto xs = apply_saliency(tape, m.embed(tape, batch, nn::Bind::Frozen), s);
      nn::Var lg = m.logits_from_embedded(tape, xs, batch.lengths,
                                          nn::Bind::Frozen, false, nullptr);
      nn::Var loss = tape.cross_entropy(lg, batch.y);
      const double lv = tape.value(loss)(0, 0);
      if (!std::isfinite(lv))
        throw TrainingError("non-finite explainer loss at epoch " +
                            std::to_string(epoch) + " step " +
                            std::to_string(steps + 1));
      opt.zero_grad();
      tape.backward(loss);
      opt.step();
      epoch_loss += lv;
      ++steps;
    }
    tl.train_loss.push_back(epoch_loss / static_cast<double>(steps));
    const double val_ce = weighted_input_cross_entropy(model, explainer, val);
    tl.val_accuracy.push_back(val_ce);  // validation objective per epoch
    tl.epochs_run = epoch;
    if (val_ce < best_ce) {
      best_ce = val_ce;
      best_epoch = epoch;
      stale_epochs = 0;
      best_params.clear();
      for (nn::Parameter* p : explainer.params()) best_params.push_back(p->value);
    } else if (++stale_epochs >= cfg.early_stop_patience) {
      break;
    }
  }

  auto ps = explainer.params();
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = best_params[i];
  tl.best_epoch = best_epoch;
  tl.best_val_accuracy = best_ce;
  return explainer;
}

std::string saliency_dump(const std::vector<EncodedExample>& data,
                          const std::vector<SaliencyDistribution>& sal,
                          const Vocabulary& vocab) {
  if (data.size() != sal.size())
    throw AlignmentError("saliency_dump: example/saliency count mismatch");
  std::ostringstream os;
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    os << i;
    for (int t = 0; t < sal[i].length; ++t) {
      std::snprintf(buf, sizeof(buf), "%.6f", sal[i].scores[static_cast<std::size_t>(t)]);
      os << (t == 0 ? '\t' : ' ')
         << vocab.token(data[i].ids[static_cast<std::size_t>(t)]) << ':' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fairtext
