#include "fairtext/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairtext/error.hpp"

namespace fairtext::runner {

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write: " + path.string());
  out << text;
}

void write_json_artifact(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json synthetic_to_json(const SyntheticGenSpec& s) {
  return {{"content_lexicon_size", s.content_lexicon_size},
          {"style_lexicon_size", s.style_lexicon_size},
          {"filler_lexicon_size", s.filler_lexicon_size},
          {"content_tokens", s.content_tokens},
          {"style_tokens", s.style_tokens},
          {"filler_tokens", s.filler_tokens},
          {"style_injection_prob", s.style_injection_prob},
          {"content_noise", s.content_noise},
          {"seed", s.seed}};
}

nlohmann::json corpus_spec_to_json(const CorpusSpec& c) {
  return {{"total_size", c.total_size},   {"balance_rate", c.balance_rate},
          {"label_ratio", c.label_ratio}, {"group_ratio", c.group_ratio},
          {"val_size", c.val_size},       {"test_size", c.test_size}};
}

std::vector<Example> build_pool(const DataConfig& cfg) {
  if (!cfg.tsv_path.empty()) return load_tsv(cfg.tsv_path);
  SyntheticGenSpec gen = cfg.synthetic;
  gen.seed = stage_seed(cfg.seed, "pool");
  return generate_synthetic_pool(gen, cfg.pool_size);
}

Vocabulary build_vocab(const std::vector<Example>& train, const EncodingConfig& enc) {
  return Vocabulary::build(train, enc.vocab_min_freq, enc.vocab_max_size);
}

void check_vocab(const Vocabulary& vocab, const CheckpointMeta& meta,
                 const char* what) {
  if (vocab.hash() != meta.vocab_hash)
    throw ConfigError(std::string(what) +
                      ": vocabulary rebuilt from the data directory does not "
                      "match the checkpoint's vocabulary hash");
}

std::vector<EncodedExample> encode_for_task(const std::vector<Example>& data,
                                            const Vocabulary& vocab,
                                            const EncodingConfig& enc,
                                            const std::string& task) {
  if (task == "z") return encode_all(relabel_with_group(data), vocab, enc.max_len);
  return encode_all(data, vocab, enc.max_len);
}

}  // namespace

const std::vector<std::string> kMethods{"base", "data_aug", "ins_weigh",
                                        "debiased_tc"};

nlohmann::json DataConfig::to_json() const {
  return {{"tsv_path", tsv_path},
          {"synthetic", synthetic_to_json(synthetic)},
          {"pool_size", pool_size},
          {"corpus", corpus_spec_to_json(corpus)},
          {"seed", seed}};
}

nlohmann::json ModelConfig::to_json() const {
  return {{"classifier", fairtext::to_json(classifier)},
          {"explainer", fairtext::to_json(explainer)},
          {"debias", fairtext::to_json(debias)},
          {"encoding", fairtext::to_json(encoding)}};
}

DebiasSettings ModelConfig::debias_settings() const {
  return {classifier, explainer, debias};
}

void prepare_data(const DataConfig& cfg, const std::filesystem::path& out_dir) {
  const std::vector<Example> pool = build_pool(cfg);
  const Split split =
      build_balanced_split(pool, cfg.corpus, stage_seed(cfg.seed, "split"));

  std::filesystem::create_directories(out_dir);
  save_tsv(out_dir / "train.tsv", split.train);
  save_tsv(out_dir / "val.tsv", split.val);
  save_tsv(out_dir / "test.tsv", split.test);
  save_tsv(out_dir / "reserve.tsv", split.reserve);

  nlohmann::json manifest =
      nlohmann::json::parse(split_manifest(cfg.corpus, cfg.seed, split));
  manifest["source"] = cfg.to_json();
  write_json_artifact(out_dir / "manifest.json", manifest);
}

PreparedData load_prepared(const std::filesystem::path& dir) {
  PreparedData d;
  d.train = load_tsv(dir / "train.tsv");
  d.val = load_tsv(dir / "val.tsv");
  d.test = load_tsv(dir / "test.tsv");
  if (std::filesystem::exists(dir / "reserve.tsv"))
    d.reserve = load_tsv(dir / "reserve.tsv");
  std::ifstream in(dir / "manifest.json");
  if (in) in >> d.manifest;
  return d;
}

void run_train(const TrainRequest& req) {
  if (std::find(kMethods.begin(), kMethods.end(), req.method) == kMethods.end())
    throw ConfigError("unknown method: " + req.method);
  if (req.task != "y" && req.task != "z")
    throw ConfigError("task must be y or z");
  if (req.task == "z" && req.method != "base")
    throw ConfigError("demographic-task training is only meaningful for method base");

  const PreparedData data = load_prepared(req.data_dir);
  std::filesystem::create_directories(req.out_dir);

  std::vector<Example> train_examples = data.train;
  if (req.method == "data_aug") {
    if (data.reserve.empty())
      throw ConfigError("data_aug requires a reserve pool (reserve.tsv)");
    train_examples = data_augmentation(data.train, data.reserve,
                                       stage_seed(req.seed, "augment"));
  }

  const Vocabulary vocab = build_vocab(train_examples, req.model.encoding);
  const auto train =
      encode_for_task(train_examples, vocab, req.model.encoding, req.task);
  const auto val = encode_for_task(data.val, vocab, req.model.encoding, req.task);

  CheckpointMeta meta;
  meta.task = req.task;
  meta.seed = req.seed;
  meta.vocab_hash = vocab.hash();
  meta.vocab_size = vocab.size();
  meta.encoding = req.model.encoding;

  nlohmann::json metrics{{"method", req.method},
                         {"task", req.task},
                         {"seed", req.seed},
                         {"config", req.model.to_json()}};

  if (req.method == "debiased_tc") {
    const DebiasResult result =
        train_debiased(train, val, req.model.debias_settings(), vocab.size(),
                       stage_seed(req.seed, "train"));
    meta.kind = "debiased";
    save_debiased(req.out_dir / "checkpoint.json", *result.state, meta);
    metrics["val_accuracy"] = evaluate_debiased(result.model, val).accuracy;
    metrics["steps"] = result.state->steps_done();
  } else {
    TrainLog log;
    ClassifierModel model = [&]() {
      if (req.method == "ins_weigh") {
        const auto weighted = instance_weights(train_examples);
        save_weighted_tsv(req.out_dir / "weighted_train.tsv", weighted);
        const auto weights = instance_weight_values(train_examples);
        return train_weighted(train, weights, val, req.model.classifier,
                              vocab.size(), stage_seed(req.seed, "train"), &log);
      }
      return train_classifier(train, val, req.model.classifier, vocab.size(),
                              stage_seed(req.seed, "train"), &log);
    }();
    meta.kind = "classifier";
    save_classifier(req.out_dir / "checkpoint.json", model, meta);
    metrics["val_accuracy"] = log.best_val_accuracy;
    metrics["best_epoch"] = log.best_epoch;
    metrics["epochs_run"] = log.epochs_run;
    metrics["train_loss"] = log.train_loss;
  }
  write_json_artifact(req.out_dir / "train_metrics.json", metrics);
}

void run_evaluate(const EvaluateRequest& req) {
  const PreparedData data = load_prepared(req.data_dir);
  const std::string kind = checkpoint_kind(req.model_path);
  std::filesystem::create_directories(req.out_dir);

  EvalResult eval;
  CheckpointMeta meta;
  std::string task = "y";
  std::vector<EncodedExample> test;

  if (kind == "classifier") {
    LoadedClassifier loaded = load_classifier(req.model_path);
    meta = loaded.meta;
    task = meta.task;
    // Vocabulary must be rebuilt from the same training corpus. The
    // data_aug method changes it, so rebuild both ways before failing.
    Vocabulary vocab = build_vocab(data.train, meta.encoding);
    if (vocab.hash() != meta.vocab_hash && !data.reserve.empty()) {
      const auto augmented =
          data_augmentation(data.train, data.reserve, stage_seed(meta.seed, "augment"));
      vocab = build_vocab(augmented, meta.encoding);
    }
    check_vocab(vocab, meta, "evaluate");
    test = encode_for_task(data.test, vocab, meta.encoding, task);
    eval = evaluate(loaded.model, test);
  } else if (kind == "debiased") {
    LoadedDebiased loaded = load_debiased(req.model_path, false);
    meta = loaded.meta;
    const Vocabulary vocab = build_vocab(data.train, meta.encoding);
    check_vocab(vocab, meta, "evaluate");
    test = encode_for_task(data.test, vocab, meta.encoding, "y");
    eval = evaluate_debiased(loaded.model, test);
  } else {
    throw ConfigError("cannot evaluate checkpoint of kind: " + kind);
  }

  nlohmann::json report{{"kind", kind},
                        {"task", task},
                        {"seed", meta.seed},
                        {"accuracy", eval.accuracy},
                        {"f1", eval.f1}};
  std::ostringstream text;
  char head[64];
  std::snprintf(head, sizeof(head), "accuracy %.2f  f1 %.2f\n",
                100.0 * eval.accuracy, 100.0 * eval.f1);
  text << head;
  if (task == "y") {
    const FairnessReport fairness =
        fairness_report(confusion_by_group(eval.predictions, test));
    report["fairness"] = {{"fpr", fairness.fpr},
                          {"fnr", fairness.fnr},
                          {"parity", fairness.parity},
                          {"fpr_overall", fairness.fpr_overall},
                          {"fnr_overall", fairness.fnr_overall},
                          {"fped", fairness.fped},
                          {"fned", fairness.fned},
                          {"dpd", fairness.dpd}};
    text << fairness.to_text();
  }
  write_json_artifact(req.out_dir / "report.json", report);
  write_text_file(req.out_dir / "report.txt", text.str());
}

void run_explain(const ExplainRequest& req) {
  const PreparedData data = load_prepared(req.data_dir);
  LoadedClassifier loaded = load_classifier(req.model_path);
  const Vocabulary vocab = build_vocab(data.train, loaded.meta.encoding);
  check_vocab(vocab, loaded.meta, "explain");

  const auto train =
      encode_for_task(data.train, vocab, loaded.meta.encoding, loaded.meta.task);
  const auto val =
      encode_for_task(data.val, vocab, loaded.meta.encoding, loaded.meta.task);
  const auto test =
      encode_for_task(data.test, vocab, loaded.meta.encoding, loaded.meta.task);

  TrainLog log;
  const SaliencyModel explainer =
      train_explainer(loaded.model, train, val, req.explainer,
                      stage_seed(req.seed, "explain"), &log);

  std::filesystem::create_directories(req.out_dir);
  CheckpointMeta meta = loaded.meta;
  meta.kind = "explainer";
  meta.seed = req.seed;
  save_explainer(req.out_dir / "explainer.json", explainer, meta);

  write_text_file(req.out_dir / "saliency.txt",
                  saliency_dump(test, explainer.explain_all(test), vocab));

  nlohmann::json metrics{
      {"task", meta.task},
      {"seed", req.seed},
      {"config", fairtext::to_json(req.explainer)},
      {"val_cross_entropy", log.best_val_accuracy},
      {"uniform_cross_entropy", uniform_input_cross_entropy(loaded.model, val)},
      {"epochs_run", log.epochs_run}};
  write_json_artifact(req.out_dir / "explain_metrics.json", metrics);
}

void run_overlap(const OverlapRequest& req) {
  const PreparedData data = load_prepared(req.data_dir);
  LoadedExplainer ey = load_explainer(req.explainer_y_path);
  LoadedExplainer ez = load_explainer(req.explainer_z_path);
  if (ey.meta.vocab_hash != ez.meta.vocab_hash)
    throw ConfigError("overlap: explainers were built over different vocabularies");
  const Vocabulary vocab = build_vocab(data.train, ey.meta.encoding);
  check_vocab(vocab, ey.meta, "overlap");

  const auto test = encode_all(data.test, vocab, ey.meta.encoding.max_len);
  const OverlapReport report = measure_overlap(ey.model, ez.model, test);

  std::filesystem::create_directories(req.out_dir);
  nlohmann::json j{{"mean_js", report.mean_js},
                   {"per_example_js", report.per_example_js},
                   {"examples", report.per_example_js.size()}};
  if (data.manifest.contains("spec"))
    j["balance_rate"] = data.manifest["spec"]["balance_rate"];
  write_json_artifact(req.out_dir / "overlap.json", j);
}

void run_sweep(const SweepRequest& req) {
  const std::vector<Example> pool = build_pool(req.data);
  SweepSettings settings;
  settings.corpus = req.data.corpus;
  settings.classifier = req.model.classifier;
  settings.explainer = req.model.explainer;
  settings.max_len = req.model.encoding.max_len;
  settings.vocab_min_freq = req.model.encoding.vocab_min_freq;
  settings.vocab_max_size = req.model.encoding.vocab_max_size;

  const SweepResult result = balance_sweep(req.rates, pool, settings, req.seeds);

  nlohmann::json config{{"data", req.data.to_json()},
                        {"model", req.model.to_json()},
                        {"rates", req.rates},
                        {"seeds", req.seeds}};
  std::filesystem::create_directories(req.out_dir);
  write_text_file(req.out_dir / "sweep.csv",
                  sweep_csv(result, config.dump()));

  nlohmann::json plot{{"config", config}};
  for (const SweepRow& r : result.averages) {
    plot["balance_rate"].push_back(r.balance_rate);
    plot["mean_js"].push_back(r.mean_js);
    plot["dpd"].push_back(r.dpd);
  }
  write_json_artifact(req.out_dir / "sweep_plot.json", plot);
}

void run_compare(const CompareRequest& req) {
  const PreparedData data = load_prepared(req.data_dir);
  std::filesystem::create_directories(req.out_dir);

  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream table;
  table << "method         FPED    FNED     DPD     Acc      F1\n";

  for (const std::string& method : req.methods) {
    if (std::find(kMethods.begin(), kMethods.end(), method) == kMethods.end())
      throw ConfigError("unknown method: " + method);

    std::vector<Example> train_examples = data.train;
    if (method == "data_aug") {
      if (data.reserve.empty())
        throw ConfigError("data_aug requires a reserve pool (reserve.tsv)");
      train_examples = data_augmentation(data.train, data.reserve,
                                         stage_seed(req.seed, "augment"));
    }
    const Vocabulary vocab = build_vocab(train_examples, req.model.encoding);
    const auto train = encode_all(train_examples, vocab, req.model.encoding.max_len);
    const auto val = encode_all(data.val, vocab, req.model.encoding.max_len);
    const auto test = encode_all(data.test, vocab, req.model.encoding.max_len);
    const std::uint64_t seed = stage_seed(req.seed, "train-" + method);

    EvalResult eval;
    if (method == "debiased_tc") {
      const DebiasResult result = train_debiased(
          train, val, req.model.debias_settings(), vocab.size(), seed);
      eval = evaluate_debiased(result.model, test);
    } else if (method == "ins_weigh") {
      const auto weights = instance_weight_values(train_examples);
      eval = evaluate(train_weighted(train, weights, val, req.model.classifier,
                                     vocab.size(), seed),
                      test);
    } else {
      eval = evaluate(train_classifier(train, val, req.model.classifier,
                                       vocab.size(), seed),
                      test);
    }
    const FairnessReport fairness =
        fairness_report(confusion_by_group(eval.predictions, test));
    rows.push_back({{"method", method},
                    {"fped", fairness.fped},
                    {"fned", fairness.fned},
                    {"dpd", fairness.dpd},
                    {"accuracy", eval.accuracy},
                    {"f1", eval.f1}});
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %7.2f %7.2f %7.2f %7.2f %7.2f\n",
                  method.c_str(), fairness.fped, fairness.fned, fairness.dpd,
                  100.0 * eval.accuracy, 100.0 * eval.f1);
    table << line;
  }

  nlohmann::json j{{"seed", req.seed},
                   {"arch", arch_name(req.model.classifier.arch)},
                   {"config", req.model.to_json()},
                   {"rows", rows}};
  write_json_artifact(req.out_dir / "compare.json", j);
  write_text_file(req.out_dir / "compare.txt", table.str());
}

}  // namespace fairtext::runner
