#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairtext/error.hpp"
#include "fairtext/overlap.hpp"
#include "fairtext/rng.hpp"

using namespace fairtext;

namespace {

std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = rng.uniform() + 1e-9;
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// Independent oracle: term-by-term JS from its definition, base 2.
double js_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  double out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) out += 0.5 * p[i] * (std::log(p[i] / m) / std::log(2.0));
    if (q[i] > 0.0) out += 0.5 * q[i] * (std::log(q[i] / m) / std::log(2.0));
  }
  return out;
}

}  // namespace

TEST_CASE("JS divergence: identity, disjoint, and the hand-computed case") {
  CHECK(js_divergence({0.3, 0.7}, {0.3, 0.7}) == doctest::Approx(0.0));
  CHECK(js_divergence({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(js_divergence({0.5, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.5, 0.5}) ==
        doctest::Approx(1.0));
  // KL(P||M) = log2(4/3), KL(Q||M) = 0.5*log2(2/3) + 0.5; JS ~ 0.311278
  const double hand = 0.5 * std::log2(4.0 / 3.0) +
                      0.5 * (0.5 * std::log2(2.0 / 3.0) + 0.5);
  CHECK(js_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(js_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(0.3113).epsilon(1e-4));
}

TEST_CASE("JS divergence is symmetric, bounded, and zero only at identity") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(12);
    const auto p = random_distribution(rng, n);
    const auto q = random_distribution(rng, n);
    const double js_pq = js_divergence(p, q);
    const double js_qp = js_divergence(q, p);
    CHECK(js_pq == js_qp);
    CHECK(js_pq >= 0.0);
    CHECK(js_pq <= 1.0 + 1e-12);
    CHECK(js_pq == doctest::Approx(js_oracle(p, q)).epsilon(1e-12));
    CHECK(js_divergence(p, p) == doctest::Approx(0.0));
  }
}

TEST_CASE("JS divergence validates its inputs") {
  CHECK_THROWS_AS(js_divergence({0.5, 0.5}, {0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(js_divergence({0.5, 0.5}, {0.5}), ValidationError);
  CHECK_THROWS_AS(js_divergence({1.5, -0.5}, {0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(js_divergence({}, {}), ValidationError);
}

TEST_CASE("measure_overlap: same explainer twice gives zero mean JS") {
  SyntheticGenSpec gen;
  gen.seed = 21;
  const auto pool = generate_synthetic_pool(gen, 200);
  const Vocabulary vocab = Vocabulary::build(pool);
  const auto data = encode_all(pool, vocab, 16);

  ExplainerConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden = 6;
  const SaliencyModel model(cfg, vocab.size(), 99);
  const OverlapReport report = measure_overlap(model, model, data);
  CHECK(report.mean_js == doctest::Approx(0.0));
  CHECK(report.per_example_js.size() == data.size());
}

TEST_CASE("measure_overlap: single-token examples have JS exactly zero") {
  std::vector<Example> pool{{{"one"}, 1, 0}, {{"two"}, 0, 1}};
  const Vocabulary vocab = Vocabulary::build(pool);
  const auto data = encode_all(pool, vocab, 8);

  ExplainerConfig cfg;
  cfg.embedding_dim = 4;
  cfg.hidden = 3;
  const SaliencyModel a(cfg, vocab.size(), 1);
  const SaliencyModel b(cfg, vocab.size(), 2);
  const OverlapReport report = measure_overlap(a, b, data);
  CHECK(report.per_example_js[0] == 0.0);
  CHECK(report.per_example_js[1] == 0.0);
}

TEST_CASE("measure_overlap rejects vocabulary mismatch") {
  ExplainerConfig cfg;
  cfg.embedding_dim = 4;
  cfg.hidden = 3;
  const SaliencyModel a(cfg, 10, 1);
  const SaliencyModel b(cfg, 12, 2);
  CHECK_THROWS_AS(measure_overlap(a, b, {}), ConfigError);
}

TEST_CASE("mean JS is the arithmetic mean of per-example values") {
  SyntheticGenSpec gen;
  gen.seed = 23;
  const auto pool = generate_synthetic_pool(gen, 150);
  const Vocabulary vocab = Vocabulary::build(pool);
  const auto data = encode_all(pool, vocab, 16);

  ExplainerConfig cfg;
  cfg.embedding_dim = 8;
  cfg.hidden = 5;
  const SaliencyModel a(cfg, vocab.size(), 5);
  const SaliencyModel b(cfg, vocab.size(), 6);
  const OverlapReport report = measure_overlap(a, b, data);
  double sum = 0.0;
  for (double v : report.per_example_js) sum += v;
  CHECK(report.mean_js ==
        doctest::Approx(sum / static_cast<double>(data.size())).epsilon(1e-12));
  CHECK(report.mean_js > 0.0);  // different random explainers disagree
}

TEST_CASE("sweep csv layout: raw rows then seed-averaged rows") {
  SweepResult result;
  result.rows = {{0.5, 1, 0.6, 2.0}, {0.5, 2, 0.7, 3.0}};
  result.averages = {{0.5, 0, 0.65, 2.5}};
  const std::string csv = sweep_csv(result, "cfg");
  CHECK(csv.find("# cfg\n") == 0);
  CHECK(csv.find("balance_rate,seed,mean_js,dpd\n") != std::string::npos);
  CHECK(csv.find("0.5,1,0.6,2\n") != std::string::npos);
  CHECK(csv.find("0.5,avg,0.65,2.5\n") != std::string::npos);
}
