#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairtext/baselines.hpp"
#include "fairtext/corpus.hpp"
#include "fairtext/debiaser.hpp"
#include "fairtext/overlap.hpp"
#include "fairtext/serialize.hpp"

namespace fairtext::runner {

// Where the example pool comes from: a TSV corpus, or the synthetic
// generator when tsv_path is empty.
struct DataConfig {
  std::string tsv_path;
  SyntheticGenSpec synthetic;
  int pool_size = 12000;
  CorpusSpec corpus;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
};

// Writes train/val/test/reserve TSVs plus manifest.json into out_dir.
void prepare_data(const DataConfig& cfg, const std::filesystem::path& out_dir);

struct PreparedData {
  std::vector<Example> train, val, test, reserve;
  nlohmann::json manifest;
};
PreparedData load_prepared(const std::filesystem::path& dir);

struct ModelConfig {
  ClassifierConfig classifier;
  ExplainerConfig explainer;
  DebiasConfig debias;
  EncodingConfig encoding;

  nlohmann::json to_json() const;
  DebiasSettings debias_settings() const;
};

extern const std::vector<std::string> kMethods;  // base data_aug ins_weigh debiased_tc

struct TrainRequest {
  std::filesystem::path data_dir;
  ModelConfig model;
  std::string method = "base";
  std::string task = "y";  // "z" trains a demographic classifier (base only)
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};
// Produces out_dir/checkpoint.json and out_dir/train_metrics.json; the
// ins_weigh method additionally dumps the weighted training corpus.
void run_train(const TrainRequest& req);

struct EvaluateRequest {
  std::filesystem::path data_dir;
  std::filesystem::path model_path;
  std::filesystem::path out_dir;
};
// report.json + report.txt with accuracy/F1 and (for task-y models) the
// per-group rates and FPED/FNED/DPD summary.
void run_evaluate(const EvaluateRequest& req);

struct ExplainRequest {
  std::filesystem::path data_dir;
  std::filesystem::path model_path;  // classifier checkpoint to explain
  ExplainerConfig explainer;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};
// explainer.json + saliency.txt (test split) + explain_metrics.json.
void run_explain(const ExplainRequest& req);

struct OverlapRequest {
  std::filesystem::path data_dir;
  std::filesystem::path explainer_y_path;
  std::filesystem::path explainer_z_path;
  std::filesystem::path out_dir;
};
void run_overlap(const OverlapRequest& req);

struct SweepRequest {
  DataConfig data;  // corpus.balance_rate is overridden per rate
  ModelConfig model;
  std::vector<double> rates{0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::filesystem::path out_dir;
};
// sweep.csv plus sweep_plot.json (seed-averaged series).
void run_sweep(const SweepRequest& req);

struct CompareRequest {
  std::filesystem::path data_dir;
  ModelConfig model;
  std::vector<std::string> methods{"base", "ins_weigh", "debiased_tc"};
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};
// One shared split; per-method fairness and performance in compare.json and
// a fixed-width compare.txt table.
void run_compare(const CompareRequest& req);

}  // namespace fairtext::runner
