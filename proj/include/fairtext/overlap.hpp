#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fairtext/corpus.hpp"
#include "fairtext/explainer.hpp"
#include "fairtext/fairness.hpp"

namespace fairtext {

// Jensen-Shannon divergence with base-2 logarithms, so the range is [0, 1].
// Inputs must be same-length distributions (non-negative, summing to 1
// within 1e-6); otherwise a ValidationError is thrown.
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

struct OverlapReport {
  std::vector<double> per_example_js;
  double mean_js = 0.0;
  // Context fields, NaN when not applicable.
  double balance_rate = std::numeric_limits<double>::quiet_NaN();
  double dpd = std::numeric_limits<double>::quiet_NaN();
};

// Per-example JS divergence between task and demographic saliency
// distributions, restricted to real tokens. Both explainers must share the
// vocabulary (configuration error otherwise).
OverlapReport measure_overlap(const SaliencyModel& explainer_y,
                              const SaliencyModel& explainer_z,
                              const std::vector<EncodedExample>& data);

struct SweepSettings {
  CorpusSpec corpus;             // balance_rate is overridden per sweep rate
  ClassifierConfig classifier;   // used for both task and demographic models
  ExplainerConfig explainer;
  int max_len = 32;
  int vocab_min_freq = 1;
  int vocab_max_size = 0;
};

struct SweepRow {
  double balance_rate = 0.0;
  std::uint64_t seed = 0;
  double mean_js = 0.0;
  double dpd = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // one per (rate, seed)
  std::vector<SweepRow> averages;  // one per rate (seed field unused)
};

// For each (rate, seed): build the split, train task and demographic
// classifiers with the same architecture, train an explainer for each, and
// record mean JS on the test split together with the task model's DPD.
// Failures are rethrown with the offending balance rate in the message.
SweepResult balance_sweep(const std::vector<double>& rates,
                          const std::vector<Example>& pool,
                          const SweepSettings& settings,
                          const std::vector<std::uint64_t>& seeds);

// CSV with a reproducibility header line, raw rows, and seed="avg" rows.
std::string sweep_csv(const SweepResult& result, const std::string& config_line);

}  // namespace fairtext
