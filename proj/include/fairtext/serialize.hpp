#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fairtext/classifiers.hpp"
#include "fairtext/debiaser.hpp"
#include "fairtext/explainer.hpp"

namespace fairtext {

// Vocabulary/encoding settings a checkpoint needs to reproduce its inputs.
struct EncodingConfig {
  int max_len = 32;
  int vocab_min_freq = 1;
  int vocab_max_size = 0;
};

struct CheckpointMeta {
  int version = 1;
  std::string kind;  // "classifier" | "explainer" | "debiased"
  std::string task = "y";
  std::uint64_t seed = 0;
  std::uint64_t vocab_hash = 0;
  int vocab_size = 0;
  EncodingConfig encoding;
};

nlohmann::json to_json(const ClassifierConfig& cfg);
ClassifierConfig classifier_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExplainerConfig& cfg);
ExplainerConfig explainer_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DebiasConfig& cfg);
DebiasConfig debias_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EncodingConfig& cfg);
EncodingConfig encoding_config_from_json(const nlohmann::json& j);

// ----- classifier checkpoints -----
void save_classifier(const std::filesystem::path& path,
                     const ClassifierModel& model, const CheckpointMeta& meta);
struct LoadedClassifier {
  ClassifierModel model;
  CheckpointMeta meta;
};
LoadedClassifier load_classifier(const std::filesystem::path& path);

// ----- explainer checkpoints -----
void save_explainer(const std::filesystem::path& path, const SaliencyModel& model,
                    const CheckpointMeta& meta);
struct LoadedExplainer {
  SaliencyModel model;
  CheckpointMeta meta;
};
LoadedExplainer load_explainer(const std::filesystem::path& path);

// ----- debiased checkpoints -----
// Saves all three parameter groups; `restore_adversary` selects whether the
// loaded result carries the adversarial classifier.
void save_debiased(const std::filesystem::path& path, const DebiasState& state,
                   const CheckpointMeta& meta);
struct LoadedDebiased {
  DebiasedModel model;
  std::optional<ClassifierModel> adversary;
  DebiasSettings settings;
  CheckpointMeta meta;
};
LoadedDebiased load_debiased(const std::filesystem::path& path,
                             bool restore_adversary);

// Peek at the "kind" field without loading tensors.
std::string checkpoint_kind(const std::filesystem::path& path);

}  // namespace fairtext
