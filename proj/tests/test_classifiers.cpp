#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairtext/classifiers.hpp"
#include "fairtext/error.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace fairtext;

namespace {

ClassifierConfig tiny_config(Arch arch) {
  ClassifierConfig cfg;
  cfg.arch = arch;
  cfg.embedding_dim = 12;
  cfg.cnn_filters = 8;
  cfg.cnn_kernel_sizes = {2, 3};
  cfg.rnn_hidden = 10;
  cfg.batch_size = 16;
  cfg.max_epochs = 30;
  return cfg;
}

std::vector<EncodedExample> encode_pool(const std::vector<Example>& pool,
                                        const Vocabulary& vocab, int max_len) {
  return encode_all(pool, vocab, max_len);
}

Batch single_batch(const std::vector<EncodedExample>& data, int min_len) {
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return make_batch(data, idx, min_len);
}

}  // namespace

TEST_CASE("config validation rejects bad values") {
  ClassifierConfig cfg;
  cfg.cnn_dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ClassifierConfig{};
  cfg.grad_clip_value = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ClassifierConfig{};
  cfg.embedding_dim = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("forward probabilities are normalized for both architectures") {
  SyntheticGenSpec gen;
  gen.seed = 3;
  const auto pool = generate_synthetic_pool(gen, 64);
  const Vocabulary vocab = Vocabulary::build(pool);

  for (Arch arch : {Arch::CNN, Arch::RNN}) {
    const ClassifierModel model(tiny_config(arch), vocab.size(), 17);
    const auto data = encode_pool(pool, vocab, 12);
    const Batch batch = single_batch(data, model.min_input_len());
    const nn::Mat probs = model.predict_probs(batch);
    REQUIRE(probs.rows() == 2);
    for (int c = 0; c < probs.cols(); ++c) {
      CHECK(probs.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(probs(0, c) >= 0.0);
      CHECK(probs(1, c) >= 0.0);
    }
  }
}

TEST_CASE("all-pad input is handled without error") {
  const int vocab_size = 5;
  for (Arch arch : {Arch::CNN, Arch::RNN}) {
    const ClassifierModel model(tiny_config(arch), vocab_size, 23);
    EncodedExample empty;
    empty.ids.assign(6, Vocabulary::kPadId);
    empty.length = 0;
    empty.y = 0;
    empty.z = 0;
    const Batch batch = single_batch({empty}, model.min_input_len());
    const nn::Mat probs = model.predict_probs(batch);
    CHECK(probs.col(0).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::isfinite(probs(0, 0)));
  }
}

TEST_CASE("predictions are invariant to trailing padding") {
  SyntheticGenSpec gen;
  gen.seed = 5;
  const auto pool = generate_synthetic_pool(gen, 40);
  const Vocabulary vocab = Vocabulary::build(pool);

  for (Arch arch : {Arch::CNN, Arch::RNN}) {
    const ClassifierModel model(tiny_config(arch), vocab.size(), 31);
    const auto short_enc = encode_pool(pool, vocab, 10);
    const auto long_enc = encode_pool(pool, vocab, 24);
    const nn::Mat p_short =
        model.predict_probs(single_batch(short_enc, model.min_input_len()));
    const nn::Mat p_long =
        model.predict_probs(single_batch(long_enc, model.min_input_len()));
    CHECK((p_short - p_long).norm() == 0.0);  // bit-exact
  }
}

TEST_CASE("classifier input gradients match central finite differences") {
  // Frozen mini-network; gradient w.r.t. a weighted-embedding input.
  Rng rng(7);
  const int D = 6, B = 3, L = 5;
  std::vector<int> lengths{5, 3, 1};

  for (Arch arch : {Arch::CNN, Arch::RNN}) {
    ClassifierConfig cfg = tiny_config(arch);
    cfg.embedding_dim = D;
    ClassifierModel model(cfg, 4, 41);
    std::vector<nn::Parameter> input;
    for (int t = 0; t < L; ++t) {
      nn::Parameter p("x" + std::to_string(t), D, B);
      p.value = testutil::random_mat(rng, D, B, 0.5);
      // zero pad positions
      for (int b = 0; b < B; ++b)
        if (t >= lengths[static_cast<std::size_t>(b)]) p.value.col(b).setZero();
      input.push_back(std::move(p));
    }
    const std::vector<int> labels{1, 0, 1};

    auto build = [&](nn::Tape& tape, bool trainable) {
      std::vector<nn::Var> seq;
      for (auto& p : input)
        seq.push_back(trainable ? tape.param(p) : tape.frozen(p));
      nn::Var lg = model.logits_from_embedded(tape, seq, lengths,
                                              nn::Bind::Frozen, false, nullptr);
      return tape.cross_entropy(lg, labels);
    };
    auto eval = [&]() {
      nn::Tape t;
      return t.value(build(t, false))(0, 0);
    };

    nn::Tape tape;
    nn::Var loss = build(tape, true);
    for (auto& p : input) p.grad.setZero();
    tape.backward(loss);
    for (int t = 0; t < L; ++t) {
      CAPTURE(arch == Arch::CNN ? "cnn" : "rnn");
      CAPTURE(t);
      CHECK(testutil::max_grad_rel_err(input[static_cast<std::size_t>(t)],
                                       input[static_cast<std::size_t>(t)].grad,
                                       eval) < 1e-3);
      // pad positions receive zero gradient
      for (int b = 0; b < B; ++b)
        if (t >= lengths[static_cast<std::size_t>(b)])
          CHECK(input[static_cast<std::size_t>(t)].grad.col(b).norm() == 0.0);
    }
  }
}

TEST_CASE("accuracy and F1 from confusion counts") {
  {
    const auto [acc, f1] = accuracy_f1(40, 10, 20, 30);
    CHECK(acc == doctest::Approx(0.7));
    CHECK(f1 == doctest::Approx(40.0 / 55.0));  // ~0.7273
  }
  {
    const auto [acc, f1] = accuracy_f1(50, 0, 0, 50);
    CHECK(acc == doctest::Approx(1.0));
    CHECK(f1 == doctest::Approx(1.0));
  }
  {
    // all predicted negative on a balanced set
    const auto [acc, f1] = accuracy_f1(0, 0, 50, 50);
    CHECK(acc == doctest::Approx(0.5));
    CHECK(f1 == doctest::Approx(0.0));
  }
}

TEST_CASE("training learns the synthetic task; oracle agrees it is learnable") {
  SyntheticGenSpec gen;
  gen.style_injection_prob = 1.0;
  gen.seed = 11;
  const auto pool = generate_synthetic_pool(gen, 1400);
  const std::vector<Example> train(pool.begin(), pool.begin() + 800);
  const std::vector<Example> val(pool.begin() + 800, pool.begin() + 1000);
  const std::vector<Example> test(pool.begin() + 1000, pool.end());

  // Oracle first: bag-of-words logistic regression separates the task.
  const double oracle_y = oracles::BowLogistic::train_and_test_accuracy(
      train, test, [](const Example& e) { return e.y; });
  REQUIRE(oracle_y >= 0.95);
  const double oracle_z = oracles::BowLogistic::train_and_test_accuracy(
      train, test, [](const Example& e) { return e.z; });
  REQUIRE(oracle_z >= 0.85);

  const Vocabulary vocab = Vocabulary::build(train);
  const auto enc_train = encode_pool(train, vocab, 12);
  const auto enc_val = encode_pool(val, vocab, 12);
  const auto enc_test = encode_pool(test, vocab, 12);

  ClassifierConfig cfg = tiny_config(Arch::CNN);
  const ClassifierModel model =
      train_classifier(enc_train, enc_val, cfg, vocab.size(), 77);
  CHECK(evaluate(model, enc_test).accuracy >= 0.95);

  // demographic task: style tokens appear in every example here
  const auto z_train = encode_pool(relabel_with_group(train), vocab, 12);
  const auto z_val = encode_pool(relabel_with_group(val), vocab, 12);
  const auto z_test = encode_pool(relabel_with_group(test), vocab, 12);
  const ClassifierModel model_z =
      train_classifier(z_train, z_val, cfg, vocab.size(), 78);
  CHECK(evaluate(model_z, z_test).accuracy >= 0.85);
}

TEST_CASE("gru classifier trains on a small separable task") {
  SyntheticGenSpec gen;
  gen.seed = 13;
  const auto pool = generate_synthetic_pool(gen, 700);
  const std::vector<Example> train(pool.begin(), pool.begin() + 400);
  const std::vector<Example> val(pool.begin() + 400, pool.begin() + 500);
  const std::vector<Example> test(pool.begin() + 500, pool.end());
  const Vocabulary vocab = Vocabulary::build(train);

  ClassifierConfig cfg = tiny_config(Arch::RNN);
  const ClassifierModel model =
      train_classifier(encode_pool(train, vocab, 12), encode_pool(val, vocab, 12),
                       cfg, vocab.size(), 55);
  CHECK(evaluate(model, encode_pool(test, vocab, 12)).accuracy >= 0.9);
}

TEST_CASE("training is deterministic given the seed") {
  SyntheticGenSpec gen;
  gen.seed = 17;
  const auto pool = generate_synthetic_pool(gen, 300);
  const std::vector<Example> train(pool.begin(), pool.begin() + 200);
  const std::vector<Example> val(pool.begin() + 200, pool.end());
  const Vocabulary vocab = Vocabulary::build(train);
  const auto enc_train = encode_pool(train, vocab, 12);
  const auto enc_val = encode_pool(val, vocab, 12);

  ClassifierConfig cfg = tiny_config(Arch::CNN);
  cfg.max_epochs = 4;
  TrainLog log_a, log_b;
  ClassifierModel a =
      train_classifier(enc_train, enc_val, cfg, vocab.size(), 99, &log_a);
  ClassifierModel b =
      train_classifier(enc_train, enc_val, cfg, vocab.size(), 99, &log_b);
  CHECK(log_a.best_val_accuracy == log_b.best_val_accuracy);
  CHECK(log_a.val_accuracy == log_b.val_accuracy);
  auto pa = a.params();
  auto pb = b.params();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK((pa[i]->value - pb[i]->value).norm() == 0.0);
}

TEST_CASE("unit weights reproduce unweighted training bit-for-bit") {
  SyntheticGenSpec gen;
  gen.seed = 19;
  const auto pool = generate_synthetic_pool(gen, 240);
  const std::vector<Example> train(pool.begin(), pool.begin() + 160);
  const std::vector<Example> val(pool.begin() + 160, pool.end());
  const Vocabulary vocab = Vocabulary::build(train);
  const auto enc_train = encode_pool(train, vocab, 12);
  const auto enc_val = encode_pool(val, vocab, 12);

  ClassifierConfig cfg = tiny_config(Arch::CNN);
  cfg.max_epochs = 3;
  const std::vector<double> unit(enc_train.size(), 1.0);
  ClassifierModel a = train_classifier(enc_train, enc_val, cfg, vocab.size(), 7);
  ClassifierModel b =
      train_classifier(enc_train, enc_val, cfg, vocab.size(), 7, nullptr, &unit);
  auto pa = a.params();
  auto pb = b.params();
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK((pa[i]->value - pb[i]->value).norm() == 0.0);
}

TEST_CASE("divergent training reports epoch and step") {
  SyntheticGenSpec gen;
  gen.seed = 23;
  const auto pool = generate_synthetic_pool(gen, 120);
  const std::vector<Example> train(pool.begin(), pool.begin() + 80);
  const std::vector<Example> val(pool.begin() + 80, pool.end());
  const Vocabulary vocab = Vocabulary::build(train);

  ClassifierConfig cfg = tiny_config(Arch::CNN);
  cfg.learning_rate = 1e28;  // blows up within the first epoch
  cfg.grad_clip_value = 1e30;
  cfg.max_epochs = 2;
  CHECK_THROWS_WITH_AS(
      train_classifier(encode_pool(train, vocab, 12), encode_pool(val, vocab, 12),
                       cfg, vocab.size(), 3),
      doctest::Contains("epoch"), TrainingError);
}

TEST_CASE("weighted-embedding input with wrong dimension is rejected") {
  const ClassifierModel model(tiny_config(Arch::CNN), 6, 3);
  std::vector<nn::Mat> seq(4, nn::Mat::Zero(5, 2));  // dim 5 != 12
  CHECK_THROWS_AS(model.predict_probs_weighted(seq, {2, 2}), ShapeError);
}

TEST_CASE("empty splits are rejected") {
  ClassifierConfig cfg = tiny_config(Arch::CNN);
  CHECK_THROWS_AS(train_classifier({}, {}, cfg, 5, 1), ConfigError);
}
