#include "fairtext/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "fairtext/error.hpp"

namespace fairtext {

std::string arch_name(Arch a) { return a == Arch::CNN ? "cnn" : "rnn"; }

Arch arch_from_name(const std::string& name) {
  if (name == "cnn") return Arch::CNN;
  if (name == "rnn") return Arch::RNN;
  throw ConfigError("unknown architecture: " + name);
}

void ClassifierConfig::validate() const {
  if (embedding_dim <= 0) throw ConfigError("embedding_dim must be positive");
  if (arch == Arch::CNN) {
    if (cnn_filters <= 0) throw ConfigError("cnn_filters must be positive");
    if (cnn_kernel_sizes.empty()) throw ConfigError("no kernel sizes");
    for (int k : cnn_kernel_sizes)
      if (k <= 0) throw ConfigError("kernel sizes must be positive");
    if (cnn_dropout < 0.0 || cnn_dropout >= 1.0)
      throw ConfigError("cnn_dropout must be in [0,1)");
  } else {
    if (rnn_hidden <= 0) throw ConfigError("rnn_hidden must be positive");
    if (rnn_dropout < 0.0 || rnn_dropout >= 1.0)
      throw ConfigError("rnn_dropout must be in [0,1)");
  }
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (grad_clip_value <= 0.0) throw ConfigError("grad_clip_value must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (early_stop_patience <= 0) throw ConfigError("patience must be positive");
  if (max_epochs <= 0) throw ConfigError("max_epochs must be positive");
}

ClassifierModel::ClassifierModel(const ClassifierConfig& cfg, int vocab_size,
                                 std::uint64_t seed, bool with_embedding)
    : cfg_(cfg), vocab_size_(vocab_size), with_embedding_(with_embedding) {
  cfg_.validate();
  if (vocab_size_ <= 0) throw ConfigError("vocab_size must be positive");
  Rng rng(seed);
  if (with_embedding_) {
    embedding_ = nn::Parameter("embedding", cfg_.embedding_dim, vocab_size_);
    embedding_.frozen_col = Vocabulary::kPadId;
    embedding_.init_uniform(rng, -0.1, 0.1);
  }
  int feature_dim = 0;
  if (cfg_.arch == Arch::CNN) {
    for (int ks : cfg_.cnn_kernel_sizes) {
      nn::Parameter w("conv" + std::to_string(ks) + ".w", cfg_.cnn_filters,
                      ks * cfg_.embedding_dim);
      w.init_xavier(rng);
      conv_w_.push_back(std::move(w));
      conv_b_.emplace_back("conv" + std::to_string(ks) + ".b", cfg_.cnn_filters, 1);
    }
    feature_dim = cfg_.cnn_filters * static_cast<int>(cfg_.cnn_kernel_sizes.size());
  } else {
    gru_ = nn::GruParams("gru", cfg_.embedding_dim, cfg_.rnn_hidden, rng);
    feature_dim = cfg_.rnn_hidden;
  }
  head_w_ = nn::Parameter("head.w", 2, feature_dim);
  head_w_.init_xavier(rng);
  head_b_ = nn::Parameter("head.b", 2, 1);
}

std::vector<nn::Parameter*> ClassifierModel::params() {
  std::vector<nn::Parameter*> out;
  if (with_embedding_) out.push_back(&embedding_);
  for (nn::Parameter* p : encoder_head_params()) out.push_back(p);
  return out;
}

std::vector<nn::Parameter*> ClassifierModel::encoder_head_params() {
  std::vector<nn::Parameter*> out;
  if (cfg_.arch == Arch::CNN) {
    for (auto& w : conv_w_) out.push_back(&w);
    for (auto& b : conv_b_) out.push_back(&b);
  } else {
    for (nn::Parameter* p : gru_.params()) out.push_back(p);
  }
  out.push_back(&head_w_);
  out.push_back(&head_b_);
  return out;
}

nn::Parameter& ClassifierModel::embedding() {
  if (!with_embedding_) throw ConfigError("model has no embedding table");
  return embedding_;
}

int ClassifierModel::min_input_len() const {
  if (cfg_.arch == Arch::RNN) return 1;
  return *std::max_element(cfg_.cnn_kernel_sizes.begin(),
                           cfg_.cnn_kernel_sizes.end());
}

std::vector<nn::Var> ClassifierModel::embed(nn::Tape& tape, const Batch& batch,
                                            nn::Bind mode) {
  if (!with_embedding_) throw ConfigError("model has no embedding table");
  nn::Var table = nn::bind(tape, embedding_, mode);
  std::vector<nn::Var> seq;
  seq.reserve(batch.ids.size());
  for (const auto& ids_t : batch.ids) seq.push_back(tape.lookup(table, ids_t));
  return seq;
}

nn::Var ClassifierModel::logits_from_embedded(nn::Tape& tape,
                                              const std::vector<nn::Var>& seq,
                                              const std::vector<int>& lengths,
                                              nn::Bind mode, bool training,
                                              Rng* dropout_rng) {
  if (seq.empty()) throw ShapeError("empty input sequence");
  for (const nn::Var& v : seq)
    if (tape.value(v).rows() != cfg_.embedding_dim)
      throw ShapeError("weighted input dim " +
                       std::to_string(tape.value(v).rows()) +
                       " != embedding_dim " + std::to_string(cfg_.embedding_dim));
  const int L = static_cast<int>(seq.size());
  const int B = static_cast<int>(lengths.size());

  nn::Var features;
  double drop_p = 0.0;
  if (cfg_.arch == Arch::CNN) {
    std::vector<nn::Var> pooled;
    for (std::size_t k = 0; k < conv_w_.size(); ++k) {
      const int ks = cfg_.cnn_kernel_sizes[k];
      nn::Var w = nn::bind(tape, conv_w_[k], mode);
      nn::Var b = nn::bind(tape, conv_b_[k], mode);
      std::vector<nn::Var> maps;
      std::vector<std::vector<char>> valid;
      for (int t = 0; t + ks <= L; ++t) {
        std::vector<nn::Var> window(seq.begin() + t, seq.begin() + t + ks);
        maps.push_back(
            tape.relu(tape.add_bias(tape.matmul(w, tape.concat_rows(window)), b)));
        // A window starting before the example's length sees >= 1 real token.
        std::vector<char> ok(static_cast<std::size_t>(B));
        for (int col = 0; col < B; ++col)
          ok[static_cast<std::size_t>(col)] =
              t < lengths[static_cast<std::size_t>(col)] ? 1 : 0;
        valid.push_back(std::move(ok));
      }
      if (maps.empty())
        pooled.push_back(tape.constant(nn::Mat::Zero(cfg_.cnn_filters, B)));
      else
        pooled.push_back(tape.masked_max(maps, valid));
    }
    features = tape.concat_rows(pooled);
    drop_p = cfg_.cnn_dropout;
  } else {
    nn::GruVars g = nn::bind_gru(tape, gru_, mode);
    std::vector<nn::Var> states =
        nn::gru_sequence(tape, g, seq, lengths, cfg_.rnn_hidden);
    features = states.back();  // carry-masked: last real token's state
    drop_p = cfg_.rnn_dropout;
  }
  if (training && drop_p > 0.0) {
    if (dropout_rng == nullptr)
      throw ConfigError("training forward requires a dropout RNG");
    features = tape.dropout(features, drop_p, *dropout_rng, true);
  }
  return tape.add_bias(tape.matmul(nn::bind(tape, head_w_, mode), features),
                       nn::bind(tape, head_b_, mode));
}

nn::Var ClassifierModel::logits(nn::Tape& tape, const Batch& batch,
                                nn::Bind mode, bool training, Rng* dropout_rng) {
  return logits_from_embedded(tape, embed(tape, batch, mode), batch.lengths,
                              mode, training, dropout_rng);
}

nn::Mat ClassifierModel::predict_probs(const Batch& batch) const {
  auto& self = const_cast<ClassifierModel&>(*this);  // frozen bind only
  nn::Tape tape;
  nn::Var lg = self.logits(tape, batch, nn::Bind::Frozen, false, nullptr);
  return tape.value(tape.softmax_cols(lg));
}

nn::Mat ClassifierModel::predict_probs_weighted(
    const std::vector<nn::Mat>& seq, const std::vector<int>& lengths) const {
  auto& self = const_cast<ClassifierModel&>(*this);
  nn::Tape tape;
  std::vector<nn::Var> vars;
  vars.reserve(seq.size());
  for (const nn::Mat& m : seq) vars.push_back(tape.constant(m));
  nn::Var lg = self.logits_from_embedded(tape, vars, lengths, nn::Bind::Frozen,
                                         false, nullptr);
  return tape.value(tape.softmax_cols(lg));
}

std::pair<double, double> accuracy_f1(long tp, long fp, long fn, long tn) {
  const long total = tp + fp + fn + tn;
  const double acc =
      total == 0 ? 0.0
                 : static_cast<double>(tp + tn) / static_cast<double>(total);
  const double f1 =
      (2 * tp + fp + fn) == 0
          ? 0.0
          : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  return {acc, f1};
}

EvalResult evaluate(const ClassifierModel& model,
                    const std::vector<EncodedExample>& data) {
  EvalResult res;
  res.predictions.resize(data.size());
  res.p_positive.resize(data.size());
  if (data.empty()) return res;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (const Batch& batch : make_batches(data, model.config().batch_size,
                                         model.min_input_len())) {
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

ClassifierModel train_classifier(const std::vector<EncodedExample>& train,
                                 const std::vector<EncodedExample>& val,
                                 const ClassifierConfig& cfg, int vocab_size,
                                 std::uint64_t seed, TrainLog* log,
                                 const std::vector<double>* weights) {
  cfg.validate();
  if (train.empty() || val.empty())
    throw ConfigError("train_classifier: empty split");
  if (weights != nullptr && weights->size() != train.size())
    throw ShapeError("train_classifier: weights misaligned with train set");

  ClassifierModel model(cfg, vocab_size, stage_seed(seed, "init"));
  nn::AdamOptimizer opt(model.params(), cfg.learning_rate, cfg.grad_clip_value);
  Rng shuffle_rng(stage_seed(seed, "shuffle"));
  Rng dropout_rng(stage_seed(seed, "dropout"));

  std::vector<nn::Mat> best_params;
  double best_acc = -1.0;
  int best_epoch = 0;
  int stale_epochs = 0;
  TrainLog local;
  TrainLog& tl = log ? *log : local;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    long steps = 0;
    for (const Batch& batch : make_batches_shuffled(
             train, cfg.batch_size, model.min_input_len(), shuffle_rng, weights)) {
      nn::Tape tape;
      nn::Var lg = model.logits(tape, batch, nn::Bind::Trainable, true, &dropout_rng);
      nn::Var loss = tape.cross_entropy(lg, batch.y, batch.weights);
      const double lv = tape.value(loss)(0, 0);
      if (!std::isfinite(lv))
        throw TrainingError("non-finite training loss at epoch " +
                            std::to_string(epoch) + " step " +
                            std::to_string(steps + 1));
      opt.zero_grad();
      tape.backward(loss);
      opt.step();
      epoch_loss += lv;
      ++steps;
    }
    tl.train_loss.push_back(epoch_loss / static_cast<double>(steps));
    const double acc = evaluate(model, val).accuracy;
    tl.val_accuracy.push_back(acc);
    tl.epochs_run = epoch;
    if (acc > best_acc) {
      best_acc = acc;
      best_epoch = epoch;
      stale_epochs = 0;
      best_params.clear();
      for (nn::Parameter* p : model.params()) best_params.push_back(p->value);
    } else if (++stale_epochs >= cfg.early_stop_patience) {
      break;
    }
  }

  auto ps = model.params();
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->value = best_params[i];
  tl.best_epoch = best_epoch;
  tl.best_val_accuracy = best_acc;
  return model;
}

}  // namespace fairtext
