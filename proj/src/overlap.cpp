#include "fairtext/overlap.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairtext/error.hpp"

namespace fairtext {

namespace {

void check_distribution(const std::vector<double>& p, const char* which) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0)
      throw ValidationError(std::string("js_divergence: ") + which +
                            " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError(std::string("js_divergence: ") + which +
                          " sums to " + std::to_string(sum));
}

}  // namespace

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw ValidationError("js_divergence: support sizes differ");
  if (p.empty()) throw ValidationError("js_divergence: empty distributions");
  check_distribution(p, "P");
  check_distribution(q, "Q");
  // JS = (KL(P||M) + KL(Q||M)) / 2 with M the midpoint; 0*log(0/.) = 0.
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_p += p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) kl_q += q[i] * std::log2(q[i] / m);
  }
  return 0.5 * kl_p + 0.5 * kl_q;
}

OverlapReport measure_overlap(const SaliencyModel& explainer_y,
                              const SaliencyModel& explainer_z,
                              const std::vector<EncodedExample>& data) {
  if (explainer_y.vocab_size() != explainer_z.vocab_size())
    throw ConfigError("measure_overlap: explainers built over different vocabularies");
  OverlapReport report;
  report.per_example_js.resize(data.size());
  if (data.empty()) return report;

  const int batch_size = explainer_y.config().batch_size;
  for (const Batch& batch : make_batches(data, batch_size, 1)) {
    const auto sy = explainer_y.explain(batch);
    const auto sz = explainer_z.explain(batch);
    for (int col = 0; col < batch.size(); ++col) {
      const std::size_t i = batch.dataset_index[static_cast<std::size_t>(col)];
      report.per_example_js[i] =
          js_divergence(sy[static_cast<std::size_t>(col)].real_scores(),
                        sz[static_cast<std::size_t>(col)].real_scores());
    }
  }
  double total = 0.0;
  for (double v : report.per_example_js) total += v;
  report.mean_js = total / static_cast<double>(data.size());
  return report;
}

SweepResult balance_sweep(const std::vector<double>& rates,
                          const std::vector<Example>& pool,
                          const SweepSettings& settings,
                          const std::vector<std::uint64_t>& seeds) {
  if (rates.empty() || seeds.empty())
    throw ConfigError("balance_sweep: need at least one rate and one seed");
  SweepResult result;
  for (double rate : rates) {
    double js_sum = 0.0, dpd_sum = 0.0;
    for (std::uint64_t seed : seeds) {
      try {
        CorpusSpec spec = settings.corpus;
        spec.balance_rate = rate;
        const Split split =
            build_balanced_split(pool, spec, stage_seed(seed, "split"));
        const Vocabulary vocab = Vocabulary::build(
            split.train, settings.vocab_min_freq, settings.vocab_max_size);

        const auto train_y = encode_all(split.train, vocab, settings.max_len);
        const auto val_y = encode_all(split.val, vocab, settings.max_len);
        const auto test_y = encode_all(split.test, vocab, settings.max_len);
        const auto train_z =
            encode_all(relabel_with_group(split.train), vocab, settings.max_len);
        const auto val_z =
            encode_all(relabel_with_group(split.val), vocab, settings.max_len);

        const ClassifierModel model_y =
            train_classifier(train_y, val_y, settings.classifier, vocab.size(),
                             stage_seed(seed, "train-y"));
        const ClassifierModel model_z =
            train_classifier(train_z, val_z, settings.classifier, vocab.size(),
                             stage_seed(seed, "train-z"));
        const SaliencyModel explainer_y =
            train_explainer(model_y, train_y, val_y, settings.explainer,
                            stage_seed(seed, "explain-y"));
        const SaliencyModel explainer_z =
            train_explainer(model_z, train_z, val_z, settings.explainer,
                            stage_seed(seed, "explain-z"));

        const OverlapReport overlap =
            measure_overlap(explainer_y, explainer_z, test_y);
        const EvalResult eval = evaluate(model_y, test_y);
        const FairnessReport fairness =
            fairness_report(confusion_by_group(eval.predictions, test_y));

        result.rows.push_back({rate, seed, overlap.mean_js, fairness.dpd});
        js_sum += overlap.mean_js;
        dpd_sum += fairness.dpd;
      } catch (const std::exception& e) {
        throw TrainingError("balance_sweep at rate " + std::to_string(rate) +
                            ", seed " + std::to_string(seed) + ": " + e.what());
      }
    }
    result.averages.push_back({rate, 0,
                               js_sum / static_cast<double>(seeds.size()),
                               dpd_sum / static_cast<double>(seeds.size())});
  }
  return result;
}

std::string sweep_csv(const SweepResult& result, const std::string& config_line) {
  std::ostringstream os;
  if (!config_line.empty()) os << "# " << config_line << '\n';
  os << "balance_rate,seed,mean_js,dpd\n";
  char buf[128];
  for (const SweepRow& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.4g,%llu,%.10g,%.10g\n", r.balance_rate,
                  static_cast<unsigned long long>(r.seed), r.mean_js, r.dpd);
    os << buf;
  }
  for (const SweepRow& r : result.averages) {
    std::snprintf(buf, sizeof(buf), "%.4g,avg,%.10g,%.10g\n", r.balance_rate,
                  r.mean_js, r.dpd);
    os << buf;
  }
  return os.str();
}

}  // namespace fairtext
