#include "fairtext/fairness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairtext/error.hpp"

namespace fairtext {

namespace {

template <typename Dataset>
GroupConfusion confusion_impl(const std::vector<int>& predictions,
                              const Dataset& dataset) {
  if (predictions.size() != dataset.size())
    throw AlignmentError("confusion_by_group: " + std::to_string(predictions.size()) +
                         " predictions for " + std::to_string(dataset.size()) +
                         " examples");
  GroupConfusion c;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto& cell = c.group[static_cast<std::size_t>(dataset[i].z)];
    const int y = dataset[i].y;
    const int pred = predictions[i];
    if (y == 1)
      pred == 1 ? ++cell.tp : ++cell.fn;
    else
      pred == 1 ? ++cell.fp : ++cell.tn;
  }
  return c;
}

}  // namespace

GroupConfusion confusion_by_group(const std::vector<int>& predictions,
                                  const std::vector<EncodedExample>& dataset) {
  return confusion_impl(predictions, dataset);
}

GroupConfusion confusion_by_group(const std::vector<int>& predictions,
                                  const std::vector<Example>& dataset) {
  return confusion_impl(predictions, dataset);
}

FairnessReport fairness_report(const GroupConfusion& c) {
  std::vector<std::string> missing;
  for (int z : {0, 1}) {
    const auto& g = c.group[static_cast<std::size_t>(z)];
    if (g.total() == 0)
      missing.push_back("parity rate (group " + std::to_string(z) + " empty)");
    if (g.actual_neg() == 0)
      missing.push_back("false positive rate (group " + std::to_string(z) +
                        " has no actual negatives)");
    if (g.actual_pos() == 0)
      missing.push_back("false negative rate (group " + std::to_string(z) +
                        " has no actual positives)");
  }
  if (!missing.empty()) {
    std::string msg = "undefined fairness rates:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw MetricUndefinedError(msg);
  }

  FairnessReport r;
  long fp = 0, an = 0, fn = 0, ap = 0;
  for (int z : {0, 1}) {
    const auto& g = c.group[static_cast<std::size_t>(z)];
    r.fpr[static_cast<std::size_t>(z)] =
        100.0 * static_cast<double>(g.fp) / static_cast<double>(g.actual_neg());
    r.fnr[static_cast<std::size_t>(z)] =
        100.0 * static_cast<double>(g.fn) / static_cast<double>(g.actual_pos());
    r.parity[static_cast<std::size_t>(z)] =
        100.0 * static_cast<double>(g.tp + g.fp) / static_cast<double>(g.total());
    fp += g.fp;
    an += g.actual_neg();
    fn += g.fn;
    ap += g.actual_pos();
  }
  r.fpr_overall = 100.0 * static_cast<double>(fp) / static_cast<double>(an);
  r.fnr_overall = 100.0 * static_cast<double>(fn) / static_cast<double>(ap);
  r.fped = std::abs(r.fpr[0] - r.fpr_overall) + std::abs(r.fpr[1] - r.fpr_overall);
  r.fned = std::abs(r.fnr[0] - r.fnr_overall) + std::abs(r.fnr[1] - r.fnr_overall);
  r.dpd = std::abs(r.parity[0] - r.parity[1]);
  return r;
}

std::string FairnessReport::to_text() const {
  char buf[256];
  std::ostringstream os;
  os << "            Group I  Group II  Overall\n";
  std::snprintf(buf, sizeof(buf), "FP rate %%   %7.2f  %8.2f  %7.2f\n", fpr[0],
                fpr[1], fpr_overall);
  os << buf;
  std::snprintf(buf, sizeof(buf), "FN rate %%   %7.2f  %8.2f  %7.2f\n", fnr[0],
                fnr[1], fnr_overall);
  os << buf;
  std::snprintf(buf, sizeof(buf), "Parity %%    %7.2f  %8.2f\n", parity[0],
                parity[1]);
  os << buf;
  std::snprintf(buf, sizeof(buf), "FPED %.2f  FNED %.2f  DPD %.2f\n", fped, fned,
                dpd);
  os << buf;
  return os.str();
}

BiasRunRow preliminary_bias_run(const std::vector<Example>& pool,
                                double balance_rate,
                                const BiasRunSettings& settings,
                                std::uint64_t seed) {
  CorpusSpec spec = settings.corpus;
  spec.balance_rate = balance_rate;
  const Split split = build_balanced_split(pool, spec, stage_seed(seed, "split"));
  const Vocabulary vocab =
      Vocabulary::build(split.train, settings.vocab_min_freq, settings.vocab_max_size);
  const auto train = encode_all(split.train, vocab, settings.max_len);
  const auto val = encode_all(split.val, vocab, settings.max_len);
  const auto test = encode_all(split.test, vocab, settings.max_len);

  const ClassifierModel model = train_classifier(
      train, val, settings.classifier, vocab.size(), stage_seed(seed, "train"));
  const EvalResult eval = evaluate(model, test);

  BiasRunRow row;
  row.balance_rate = balance_rate;
  row.seed = seed;
  row.fairness = fairness_report(confusion_by_group(eval.predictions, test));
  row.accuracy = eval.accuracy;
  row.f1 = eval.f1;
  return row;
}

}  // namespace fairtext
