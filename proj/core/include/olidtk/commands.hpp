#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "olidtk/pipeline.hpp"

namespace olidtk {

// Dataset statistics and per-class frequent tokens, rendered as TSV.
struct ExploreOptions {
  std::string data_path;
  TaskId task = TaskId::A;
  int top_k = 20;
  std::optional<std::string> emoji_map_path;
  std::optional<std::string> stoplist_path;
};
void cmd_explore(const ExploreOptions& options, std::ostream& out);

// Trains per the config and writes the model artifact (and optionally the
// evaluation report next to it).
struct TrainOptions {
  RunConfig config;
  std::string data_path;
  std::optional<std::string> external_test_path;
  std::string model_out;
  std::optional<std::string> report_out;  // TSV; a .json twin is written too
};
void cmd_train(const TrainOptions& options, std::ostream& log);

// Evaluates a stored artifact. With use_recorded_split the artifact's split
// settings carve the test fold out of --data; otherwise the whole file is
// the test set.
struct EvaluateOptions {
  std::string model_path;
  std::string data_path;
  bool use_recorded_split = false;
  std::optional<std::string> out_prefix;  // writes <prefix>.tsv and <prefix>.json
};
void cmd_evaluate(const EvaluateOptions& options, std::ostream& out);

// Labels raw text: one --text argument or one input line per prediction.
struct PredictOptions {
  std::string model_path;
  std::optional<std::string> text;
  std::optional<std::string> input_path;  // plain text, one document per line
};
void cmd_predict(const PredictOptions& options, std::ostream& out);

// Cross product of models x features x sampling from a grid config file.
// Every run gets its own derived seed; failed runs yield NA cells and the
// grid carries on. Artifacts and logs land in out_dir.
struct ExperimentOptions {
  std::string grid_config_path;
  std::string data_path;
  std::string out_dir;
  int parallel = 1;
};
void cmd_experiment(const ExperimentOptions& options, std::ostream& out, std::ostream& err);

}  // namespace olidtk
