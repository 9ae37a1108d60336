#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairtext/runner.hpp"

namespace {

using fairtext::runner::DataConfig;
using fairtext::runner::ModelConfig;

void add_data_options(CLI::App* cmd, DataConfig& data) {
  cmd->add_option("--tsv", data.tsv_path, "TSV corpus path (default: synthetic pool)");
  cmd->add_option("--pool-size", data.pool_size, "synthetic pool size");
  cmd->add_option("--balance-rate", data.corpus.balance_rate,
                  "Group I positive fraction of the training set");
  cmd->add_option("--train-size", data.corpus.total_size, "training set size");
  cmd->add_option("--val-size", data.corpus.val_size, "validation set size");
  cmd->add_option("--test-size", data.corpus.test_size, "test set size");
  cmd->add_option("--style-injection", data.synthetic.style_injection_prob,
                  "probability an example carries group-style tokens");
  cmd->add_option("--content-noise", data.synthetic.content_noise,
                  "probability a content token comes from the opposite lexicon");
  cmd->add_option("--seed", data.seed, "run seed");
}

void add_model_options(CLI::App* cmd, ModelConfig& model) {
  cmd->add_option_function<std::string>(
         "--arch",
         [&model](const std::string& v) {
           model.classifier.arch = fairtext::arch_from_name(v);
         },
         "classifier architecture")
      ->check(CLI::IsMember({"cnn", "rnn"}));
  cmd->add_option("--embedding-dim", model.classifier.embedding_dim);
  cmd->add_option("--cnn-filters", model.classifier.cnn_filters);
  cmd->add_option("--rnn-hidden", model.classifier.rnn_hidden);
  cmd->add_option("--max-epochs", model.classifier.max_epochs);
  cmd->add_option("--batch-size", model.classifier.batch_size);
  cmd->add_option("--expl-embedding-dim", model.explainer.embedding_dim);
  cmd->add_option("--expl-hidden", model.explainer.hidden);
  cmd->add_option("--expl-max-epochs", model.explainer.max_epochs);
  cmd->add_option("--debias-epochs", model.debias.epochs);
  cmd->add_option("--lambda", model.debias.reversal.lambda,
                  "gradient reversal strength");
  cmd->add_option("--max-len", model.encoding.max_len);
  cmd->add_option("--min-freq", model.encoding.vocab_min_freq);
  cmd->add_option("--max-vocab", model.encoding.vocab_max_size);
}

std::vector<std::uint64_t> expand_seeds(int n, const std::string& list) {
  std::vector<std::uint64_t> seeds;
  if (!list.empty()) {
    std::size_t at = 0;
    while (at < list.size()) {
      const std::size_t comma = list.find(',', at);
      const std::string tok = list.substr(at, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - at);
      seeds.push_back(std::stoull(tok));
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
  } else {
    for (int i = 1; i <= n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairtext: measure, explain, and mitigate implicit demographic "
               "bias in text classifiers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file");

  // prepare-data
  DataConfig data;
  std::string out_dir;
  auto* prep = app.add_subcommand("prepare-data",
                                  "build a balance-rate-controlled split");
  add_data_options(prep, data);
  prep->add_option("--out", out_dir, "output directory")->required();

  // train
  fairtext::runner::TrainRequest train_req;
  auto* train = app.add_subcommand("train", "train a classifier (any method)");
  train->add_option("--data", train_req.data_dir, "prepared data directory")->required();
  train->add_option("--method", train_req.method, "base|data_aug|ins_weigh|debiased_tc")
      ->check(CLI::IsMember(fairtext::runner::kMethods));
  train->add_option("--task", train_req.task, "y (task) or z (demographic)")
      ->check(CLI::IsMember({"y", "z"}));
  train->add_option("--seed", train_req.seed);
  train->add_option("--out", train_req.out_dir)->required();
  add_model_options(train, train_req.model);

  // evaluate
  fairtext::runner::EvaluateRequest eval_req;
  auto* eval = app.add_subcommand("evaluate", "fairness + performance report");
  eval->add_option("--data", eval_req.data_dir)->required();
  eval->add_option("--model", eval_req.model_path, "checkpoint path")->required();
  eval->add_option("--out", eval_req.out_dir)->required();

  // explain
  fairtext::runner::ExplainRequest explain_req;
  auto* explain = app.add_subcommand("explain",
                                     "train an explainer for a checkpoint and "
                                     "dump test-set saliency");
  explain->add_option("--data", explain_req.data_dir)->required();
  explain->add_option("--model", explain_req.model_path)->required();
  explain->add_option("--seed", explain_req.seed);
  explain->add_option("--out", explain_req.out_dir)->required();
  explain->add_option("--expl-embedding-dim", explain_req.explainer.embedding_dim);
  explain->add_option("--expl-hidden", explain_req.explainer.hidden);
  explain->add_option("--expl-max-epochs", explain_req.explainer.max_epochs);

  // overlap
  fairtext::runner::OverlapRequest overlap_req;
  auto* overlap = app.add_subcommand("overlap",
                                     "JS divergence between two explainers");
  overlap->add_option("--data", overlap_req.data_dir)->required();
  overlap->add_option("--explainer-y", overlap_req.explainer_y_path)->required();
  overlap->add_option("--explainer-z", overlap_req.explainer_z_path)->required();
  overlap->add_option("--out", overlap_req.out_dir)->required();

  // sweep
  fairtext::runner::SweepRequest sweep_req;
  int sweep_seed_count = 3;
  std::string sweep_seed_list;
  auto* sweep = app.add_subcommand("sweep",
                                   "balance-rate sweep: mean JS and DPD per rate");
  add_data_options(sweep, sweep_req.data);
  add_model_options(sweep, sweep_req.model);
  sweep->add_option("--rates", sweep_req.rates, "balance rates")->delimiter(',');
  sweep->add_option("--seeds", sweep_seed_count, "number of seeds (1..N)");
  sweep->add_option("--seed-list", sweep_seed_list, "explicit seeds a,b,c");
  sweep->add_option("--out", out_dir)->required();

  // compare
  fairtext::runner::CompareRequest compare_req;
  auto* compare = app.add_subcommand("compare",
                                     "train several methods on one split and "
                                     "tabulate fairness + performance");
  compare->add_option("--data", compare_req.data_dir)->required();
  compare->add_option("--methods", compare_req.methods)->delimiter(',');
  compare->add_option("--seed", compare_req.seed);
  compare->add_option("--out", compare_req.out_dir)->required();
  add_model_options(compare, compare_req.model);

  CLI11_PARSE(app, argc, argv);

  try {
    if (prep->parsed()) {
      fairtext::runner::prepare_data(data, out_dir);
    } else if (train->parsed()) {
      fairtext::runner::run_train(train_req);
    } else if (eval->parsed()) {
      fairtext::runner::run_evaluate(eval_req);
    } else if (explain->parsed()) {
      fairtext::runner::run_explain(explain_req);
    } else if (overlap->parsed()) {
      fairtext::runner::run_overlap(overlap_req);
    } else if (sweep->parsed()) {
      sweep_req.seeds = expand_seeds(sweep_seed_count, sweep_seed_list);
      sweep_req.out_dir = out_dir;
      fairtext::runner::run_sweep(sweep_req);
    } else if (compare->parsed()) {
      fairtext::runner::run_compare(compare_req);
    }
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what()
              << "\n";
    return 1;
  }
  return 0;
}
