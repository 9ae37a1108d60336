#include "fairtext/serialize.hpp"

#include <fstream>

#include "fairtext/error.hpp"

namespace fairtext {

namespace {

nlohmann::json params_to_json(const std::vector<nn::Parameter*>& params) {
  nlohmann::json out = nlohmann::json::object();
  for (const nn::Parameter* p : params) {
    std::vector<double> data(static_cast<std::size_t>(p->value.size()));
    // Column-major, matching Eigen's storage.
    Eigen::Map<nn::Mat>(data.data(), p->value.rows(), p->value.cols()) = p->value;
    out[p->name] = {{"rows", p->value.rows()},
                    {"cols", p->value.cols()},
                    {"data", data}};
  }
  return out;
}

void params_from_json(const nlohmann::json& j,
                      const std::vector<nn::Parameter*>& params) {
  for (nn::Parameter* p : params) {
    if (!j.contains(p->name))
      throw LoadError("checkpoint missing parameter: " + p->name);
    const auto& e = j.at(p->name);
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    if (rows != p->value.rows() || cols != p->value.cols())
      throw LoadError("checkpoint parameter " + p->name + " has shape " +
                      std::to_string(rows) + "x" + std::to_string(cols) +
                      ", expected " + std::to_string(p->value.rows()) + "x" +
                      std::to_string(p->value.cols()));
    const auto data = e.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw LoadError("checkpoint parameter " + p->name + " has wrong size");
    p->value = Eigen::Map<const nn::Mat>(data.data(), rows, cols);
    p->grad.setZero();
  }
}

nlohmann::json meta_to_json(const CheckpointMeta& m) {
  return {{"version", m.version}, {"kind", m.kind},
          {"task", m.task},       {"seed", m.seed},
          {"vocab_hash", m.vocab_hash}, {"vocab_size", m.vocab_size},
          {"encoding", to_json(m.encoding)}};
}

CheckpointMeta meta_from_json(const nlohmann::json& j) {
  CheckpointMeta m;
  m.version = j.at("version").get<int>();
  m.kind = j.at("kind").get<std::string>();
  m.task = j.at("task").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
  m.vocab_size = j.at("vocab_size").get<int>();
  m.encoding = encoding_config_from_json(j.at("encoding"));
  return m;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write checkpoint: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

nlohmann::json to_json(const ClassifierConfig& cfg) {
  return {{"arch", arch_name(cfg.arch)},
          {"embedding_dim", cfg.embedding_dim},
          {"cnn_filters", cfg.cnn_filters},
          {"cnn_kernel_sizes", cfg.cnn_kernel_sizes},
          {"cnn_dropout", cfg.cnn_dropout},
          {"rnn_hidden", cfg.rnn_hidden},
          {"rnn_dropout", cfg.rnn_dropout},
          {"learning_rate", cfg.learning_rate},
          {"grad_clip_value", cfg.grad_clip_value},
          {"batch_size", cfg.batch_size},
          {"early_stop_patience", cfg.early_stop_patience},
          {"max_epochs", cfg.max_epochs}};
}

ClassifierConfig classifier_config_from_json(const nlohmann::json& j) {
  ClassifierConfig cfg;
  cfg.arch = arch_from_name(j.at("arch").get<std::string>());
  cfg.embedding_dim = j.at("embedding_dim").get<int>();
  cfg.cnn_filters = j.at("cnn_filters").get<int>();
  cfg.cnn_kernel_sizes = j.at("cnn_kernel_sizes").get<std::vector<int>>();
  cfg.cnn_dropout = j.at("cnn_dropout").get<double>();
  cfg.rnn_hidden = j.at("rnn_hidden").get<int>();
  cfg.rnn_dropout = j.at("rnn_dropout").get<double>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.grad_clip_value = j.at("grad_clip_value").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.early_stop_patience = j.at("early_stop_patience").get<int>();
  cfg.max_epochs = j.at("max_epochs").get<int>();
  return cfg;
}

nlohmann::json to_json(const ExplainerConfig& cfg) {
  return {{"embedding_dim", cfg.embedding_dim},
          {"hidden", cfg.hidden},
          {"learning_rate", cfg.learning_rate},
          {"grad_clip_value", cfg.grad_clip_value},
          {"batch_size", cfg.batch_size},
          {"early_stop_patience", cfg.early_stop_patience},
          {"max_epochs", cfg.max_epochs}};
}

ExplainerConfig explainer_config_from_json(const nlohmann::json& j) {
  ExplainerConfig cfg;
  cfg.embedding_dim = j.at("embedding_dim").get<int>();
  cfg.hidden = j.at("hidden").get<int>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.grad_clip_value = j.at("grad_clip_value").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.early_stop_patience = j.at("early_stop_patience").get<int>();
  cfg.max_epochs = j.at("max_epochs").get<int>();
  return cfg;
}

nlohmann::json to_json(const DebiasConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"lambda", cfg.reversal.lambda},
          {"xi", cfg.xi}};
}

DebiasConfig debias_config_from_json(const nlohmann::json& j) {
  DebiasConfig cfg;
  cfg.epochs = j.at("epochs").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.reversal.lambda = j.at("lambda").get<double>();
  cfg.xi = j.at("xi").get<double>();
  return cfg;
}

nlohmann::json to_json(const EncodingConfig& cfg) {
  return {{"max_len", cfg.max_len},
          {"vocab_min_freq", cfg.vocab_min_freq},
          {"vocab_max_size", cfg.vocab_max_size}};
}

EncodingConfig encoding_config_from_json(const nlohmann::json& j) {
  EncodingConfig cfg;
  cfg.max_len = j.at("max_len").get<int>();
  cfg.vocab_min_freq = j.at("vocab_min_freq").get<int>();
  cfg.vocab_max_size = j.at("vocab_max_size").get<int>();
  return cfg;
}

void save_classifier(const std::filesystem::path& path,
                     const ClassifierModel& model, const CheckpointMeta& meta) {
  auto& m = const_cast<ClassifierModel&>(model);
  nlohmann::json j = meta_to_json(meta);
  j["kind"] = "classifier";
  j["config"] = to_json(model.config());
  j["params"] = params_to_json(m.params());
  write_json_file(path, j);
}

LoadedClassifier load_classifier(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  CheckpointMeta meta = meta_from_json(j);
  if (meta.kind != "classifier")
    throw LoadError("expected a classifier checkpoint, found: " + meta.kind);
  const ClassifierConfig cfg = classifier_config_from_json(j.at("config"));
  ClassifierModel model(cfg, meta.vocab_size, /*seed=*/0);
  params_from_json(j.at("params"), model.params());
  return {std::move(model), std::move(meta)};
}

void save_explainer(const std::filesystem::path& path, const SaliencyModel& model,
                    const CheckpointMeta& meta) {
  auto& m = const_cast<SaliencyModel&>(model);
  nlohmann::json j = meta_to_json(meta);
  j["kind"] = "explainer";
  j["config"] = to_json(model.config());
  j["params"] = params_to_json(m.params());
  write_json_file(path, j);
}

LoadedExplainer load_explainer(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  CheckpointMeta meta = meta_from_json(j);
  if (meta.kind != "explainer")
    throw LoadError("expected an explainer checkpoint, found: " + meta.kind);
  const ExplainerConfig cfg = explainer_config_from_json(j.at("config"));
  SaliencyModel model(cfg, meta.vocab_size, /*seed=*/0);
  params_from_json(j.at("params"), model.params());
  return {std::move(model), std::move(meta)};
}

void save_debiased(const std::filesystem::path& path, const DebiasState& state,
                   const CheckpointMeta& meta) {
  auto& s = const_cast<DebiasState&>(state);
  nlohmann::json j = meta_to_json(meta);
  j["kind"] = "debiased";
  j["config"] = {{"classifier", to_json(state.settings().classifier)},
                 {"corrector", to_json(state.settings().corrector)},
                 {"debias", to_json(state.settings().debias)}};
  j["params"] = {{"corrector", params_to_json(s.corrector().params())},
                 {"main", params_to_json(s.main().params())},
                 {"adversary", params_to_json(s.adversary().params())}};
  write_json_file(path, j);
}

LoadedDebiased load_debiased(const std::filesystem::path& path,
                             bool restore_adversary) {
  const nlohmann::json j = read_json_file(path);
  CheckpointMeta meta = meta_from_json(j);
  if (meta.kind != "debiased")
    throw LoadError("expected a debiased checkpoint, found: " + meta.kind);
  DebiasSettings settings;
  settings.classifier = classifier_config_from_json(j.at("config").at("classifier"));
  settings.corrector = explainer_config_from_json(j.at("config").at("corrector"));
  settings.debias = debias_config_from_json(j.at("config").at("debias"));

  SaliencyModel corrector(settings.corrector, meta.vocab_size, 0);
  params_from_json(j.at("params").at("corrector"), corrector.params());
  ClassifierModel main_model(settings.classifier, meta.vocab_size, 0);
  params_from_json(j.at("params").at("main"), main_model.params());

  LoadedDebiased out{DebiasedModel{std::move(corrector), std::move(main_model)},
                     std::nullopt, settings, std::move(meta)};
  if (restore_adversary) {
    ClassifierModel adv(settings.classifier, out.meta.vocab_size, 0, false);
    params_from_json(j.at("params").at("adversary"), adv.params());
    out.adversary = std::move(adv);
  }
  return out;
}

std::string checkpoint_kind(const std::filesystem::path& path) {
  return read_json_file(path).at("kind").get<std::string>();
}

}  // namespace fairtext
