// Command line front end: explore | train | evaluate | predict | experiment.
// Exit codes: 0 success, 2 configuration errors, 3 data errors, 4 numeric or
// internal errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "olidtk/commands.hpp"
#include "olidtk/errors.hpp"

namespace {

using olidtk::RunConfig;

struct CommonModelFlags {
  std::string task = "a";
  std::string config_path;
  std::string model = "svm";
  std::string features = "tfidf";
  std::string sampling = "none";
  uint64_t seed = 42;
  std::string glove;
  int glove_dim = 200;
  std::string emoji_map;
  double train_fraction = 0.8;
  bool no_stratify = false;
  int min_df = 1;
  int max_len = 60;
  bool tfidf_l2 = false;
  int smote_k = 5;
  bool no_densify = false;
  int epochs = -1;
  double lr = -1.0;
  int hidden_dim = -1;
  bool unidirectional = false;
  double nb_alpha = -1.0;
  int n_trees = -1;
  int max_depth = std::numeric_limits<int>::min();
};

void add_model_flags(CLI::App* cmd, CommonModelFlags& f) {
  cmd->add_option("--task", f.task, "Classification task: a, b or c");
  cmd->add_option("--config", f.config_path, "JSON configuration file (flags override it)");
  cmd->add_option("--model", f.model, "nb | logreg | svm | forest | lstm");
  cmd->add_option("--features", f.features, "count | tfidf | glove-avg | glove-seq");
  cmd->add_option("--sampling", f.sampling, "none | undersample | oversample | smote");
  cmd->add_option("--seed", f.seed, "Base random seed");
  cmd->add_option("--glove", f.glove, "GloVe text file with pretrained vectors");
  cmd->add_option("--glove-dim", f.glove_dim, "Dimension of the GloVe vectors");
  cmd->add_option("--emoji-map", f.emoji_map, "Emoji replacement TSV (default: built in)");
  cmd->add_option("--train-fraction", f.train_fraction, "Training share of the split");
  cmd->add_flag("--no-stratify", f.no_stratify, "Split without class stratification");
  cmd->add_option("--min-df", f.min_df, "Minimum document frequency for the vocabulary");
  cmd->add_option("--max-len", f.max_len, "Sequence length for the recurrent model");
  cmd->add_flag("--tfidf-l2", f.tfidf_l2, "L2-normalize tf-idf rows");
  cmd->add_option("--smote-k", f.smote_k, "Neighbors considered by smote");
  cmd->add_flag("--no-densify", f.no_densify, "Refuse to densify sparse rows for smote");
  cmd->add_option("--epochs", f.epochs, "Training epochs (model-specific default)");
  cmd->add_option("--lr", f.lr, "Learning rate (model-specific default)");
  cmd->add_option("--hidden-dim", f.hidden_dim, "Recurrent hidden size");
  cmd->add_flag("--unidirectional", f.unidirectional, "Disable the backward direction");
  cmd->add_option("--alpha", f.nb_alpha, "Naive Bayes smoothing");
  cmd->add_option("--n-trees", f.n_trees, "Trees in the forest");
  cmd->add_option("--max-depth", f.max_depth, "Tree depth cap (0 = unlimited)");
}

RunConfig build_config(const CLI::App* cmd, const CommonModelFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) throw olidtk::ConfigError("cannot open configuration file '" + f.config_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cfg = olidtk::parse_run_config(text);
  }
  auto given = [cmd](const std::string& name) { return cmd->count(name) > 0; };
  if (given("--task")) cfg.task = olidtk::parse_task(f.task);
  if (given("--model")) cfg.model = f.model;
  if (given("--features")) cfg.features = f.features;
  if (given("--sampling")) cfg.sampling = f.sampling;
  if (given("--seed")) {
    cfg.seed = f.seed;
    cfg.split.seed = f.seed;
  }
  if (given("--glove")) cfg.glove_path = f.glove;
  if (given("--glove-dim")) cfg.glove_dim = f.glove_dim;
  if (given("--emoji-map")) cfg.emoji_map_path = f.emoji_map;
  if (given("--train-fraction")) cfg.split.train_fraction = f.train_fraction;
  if (given("--no-stratify")) cfg.split.stratified = false;
  if (given("--min-df")) cfg.min_df = f.min_df;
  if (given("--max-len")) cfg.max_len = f.max_len;
  if (given("--tfidf-l2")) cfg.tfidf_l2 = f.tfidf_l2;
  if (given("--smote-k")) cfg.smote_k = f.smote_k;
  if (given("--no-densify")) cfg.allow_densify = false;
  if (given("--epochs")) {
    cfg.logreg.epochs = f.epochs;
    cfg.svm.epochs = f.epochs;
    cfg.lstm.epochs = f.epochs;
  }
  if (given("--lr")) {
    cfg.logreg.lr = f.lr;
    cfg.lstm.lr = f.lr;
  }
  if (given("--hidden-dim")) cfg.lstm.hidden_dim = f.hidden_dim;
  if (given("--unidirectional")) cfg.lstm.bidirectional = false;
  if (given("--alpha")) cfg.nb_alpha = f.nb_alpha;
  if (given("--n-trees")) cfg.forest.n_trees = f.n_trees;
  if (given("--max-depth")) cfg.forest.max_depth = f.max_depth;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offensive language identification toolkit"};
  app.require_subcommand(1);

  // explore
  auto* explore = app.add_subcommand("explore", "Dataset statistics and frequent tokens");
  olidtk::ExploreOptions explore_opts;
  std::string explore_task = "a", explore_emoji, explore_stoplist, explore_out;
  explore->add_option("--data", explore_opts.data_path, "OLID-format TSV file")->required();
  explore->add_option("--task", explore_task, "Classification task: a, b or c");
  explore->add_option("--top-k", explore_opts.top_k, "Tokens listed per class");
  explore->add_option("--emoji-map", explore_emoji, "Emoji replacement TSV");
  explore->add_option("--stoplist", explore_stoplist, "Stopword file, one word per line");
  explore->add_option("--out", explore_out, "Write the TSV here instead of stdout");

  // train
  auto* train = app.add_subcommand("train", "Train a model and write the artifact");
  CommonModelFlags train_flags;
  olidtk::TrainOptions train_opts;
  std::string train_external, train_report;
  train->add_option("--data", train_opts.data_path, "OLID-format TSV file")->required();
  train->add_option("--out", train_opts.model_out, "Output model file")->required();
  train->add_option("--external-test", train_external, "Evaluate on this file instead of a split");
  train->add_option("--report", train_report, "Also write the evaluation report (TSV)");
  add_model_flags(train, train_flags);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a stored model");
  olidtk::EvaluateOptions eval_opts;
  std::string eval_out_prefix;
  evaluate->add_option("--model", eval_opts.model_path, "Model artifact")->required();
  evaluate->add_option("--data", eval_opts.data_path, "OLID-format TSV file")->required();
  evaluate->add_flag("--split-test", eval_opts.use_recorded_split,
                     "Evaluate on the recorded test fold of --data");
  evaluate->add_option("--out", eval_out_prefix, "Report file prefix (.tsv and .json)");

  // predict
  auto* predict = app.add_subcommand("predict", "Label raw text with a stored model");
  olidtk::PredictOptions predict_opts;
  std::string predict_text, predict_input, predict_out;
  predict->add_option("--model", predict_opts.model_path, "Model artifact")->required();
  predict->add_option("--text", predict_text, "One document on the command line");
  predict->add_option("--input", predict_input, "Text file, one document per line");
  predict->add_option("--out", predict_out, "Write predictions here instead of stdout");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a model/feature/sampling grid");
  olidtk::ExperimentOptions exp_opts;
  experiment->add_option("--config", exp_opts.grid_config_path, "Grid configuration JSON")
      ->required();
  experiment->add_option("--data", exp_opts.data_path, "OLID-format TSV file")->required();
  experiment->add_option("--out-dir", exp_opts.out_dir, "Directory for artifacts and reports")
      ->required();
  experiment->add_option("--parallel", exp_opts.parallel, "Concurrent runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (explore->parsed()) {
      explore_opts.task = olidtk::parse_task(explore_task);
      if (!explore_emoji.empty()) explore_opts.emoji_map_path = explore_emoji;
      if (!explore_stoplist.empty()) explore_opts.stoplist_path = explore_stoplist;
      if (!explore_out.empty()) {
        std::ofstream out(explore_out, std::ios::binary | std::ios::trunc);
        if (!out) throw olidtk::DataError("cannot open '" + explore_out + "' for writing");
        olidtk::cmd_explore(explore_opts, out);
      } else {
        olidtk::cmd_explore(explore_opts, std::cout);
      }
    } else if (train->parsed()) {
      train_opts.config = build_config(train, train_flags);
      if (!train_external.empty()) train_opts.external_test_path = train_external;
      if (!train_report.empty()) train_opts.report_out = train_report;
      olidtk::cmd_train(train_opts, std::cout);
    } else if (evaluate->parsed()) {
      if (!eval_out_prefix.empty()) eval_opts.out_prefix = eval_out_prefix;
      olidtk::cmd_evaluate(eval_opts, std::cout);
    } else if (predict->parsed()) {
      if (!predict_text.empty()) predict_opts.text = predict_text;
      if (!predict_input.empty()) predict_opts.input_path = predict_input;
      if (!predict_out.empty()) {
        std::ofstream out(predict_out, std::ios::binary | std::ios::trunc);
        if (!out) throw olidtk::DataError("cannot open '" + predict_out + "' for writing");
        olidtk::cmd_predict(predict_opts, out);
      } else {
        olidtk::cmd_predict(predict_opts, std::cout);
      }
    } else if (experiment->parsed()) {
      olidtk::cmd_experiment(exp_opts, std::cout, std::cerr);
    }
  } catch (const olidtk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const olidtk::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
