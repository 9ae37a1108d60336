#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairtext/classifiers.hpp"
#include "fairtext/corpus.hpp"

namespace fairtext {

// Per-group confusion counts; group index is the z attribute.
struct GroupConfusion {
  struct Cell {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
    long actual_pos() const { return tp + fn; }
    long actual_neg() const { return fp + tn; }
  };
  std::array<Cell, 2> group;
};

GroupConfusion confusion_by_group(const std::vector<int>& predictions,
                                  const std::vector<EncodedExample>& dataset);
GroupConfusion confusion_by_group(const std::vector<int>& predictions,
                                  const std::vector<Example>& dataset);

// All rates in percentage points. Overall rates are pooled (total false
// positives over total actual negatives), not averages of group rates; the
// two coincide only for equal-size groups.
struct FairnessReport {
  std::array<double, 2> fpr{};     // false positive rate per group
  std::array<double, 2> fnr{};     // false negative rate per group
  std::array<double, 2> parity{};  // P(pred=1 | z) per group
  double fpr_overall = 0.0;
  double fnr_overall = 0.0;
  double fped = 0.0;  // sum_z |FPR_z - FPR_overall|
  double fned = 0.0;  // sum_z |FNR_z - FNR_overall|
  double dpd = 0.0;   // |parity_0 - parity_1|

  std::string to_text() const;
};

// Throws MetricUndefinedError when a group lacks the actual positives /
// negatives a rate needs; the message lists every unavailable rate.
FairnessReport fairness_report(const GroupConfusion& confusion);

// One preliminary-study row: per-group false positive/negative and
// demographic parity rates of a freshly trained base classifier.
struct BiasRunRow {
  double balance_rate = 0.0;
  std::uint64_t seed = 0;
  FairnessReport fairness;
  double accuracy = 0.0;
  double f1 = 0.0;
};

struct BiasRunSettings {
  CorpusSpec corpus;
  ClassifierConfig classifier;
  int max_len = 32;
  int vocab_min_freq = 1;
  int vocab_max_size = 0;
};

BiasRunRow preliminary_bias_run(const std::vector<Example>& pool, double balance_rate,
                                const BiasRunSettings& settings, std::uint64_t seed);

}  // namespace fairtext
