#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "olidtk/corpus.hpp"
#include "olidtk/eval.hpp"
#include "olidtk/forest.hpp"
#include "olidtk/linear.hpp"
#include "olidtk/model_io.hpp"

namespace olidtk {

// Recurrent-model hyperparameters as exposed to configuration files.
struct LstmHyper {
  int embed_dim = 200;
  int hidden_dim = 64;
  int dense_dim = 32;
  int batch_size = 32;
  int epochs = 10;
  double lr = 1e-3;
  bool embeddings_trainable = true;
  bool bidirectional = true;
  double grad_clip_norm = 5.0;
};

// One training run: data handling, features, sampling, model choice and
// every hyperparameter, all defaulted to the documented values.
struct RunConfig {
  TaskId task = TaskId::A;
  std::string model = "svm";       // nb | logreg | svm | forest | lstm
  std::string features = "tfidf";  // count | tfidf | glove-avg | glove-seq
  std::string sampling = "none";   // none | undersample | oversample | smote
  SplitSpec split{0.8, 42, true};
  uint64_t seed = 42;

  std::optional<std::string> glove_path;
  int glove_dim = 200;
  std::optional<std::string> emoji_map_path;

  int min_df = 1;
  int max_len = 60;
  bool tfidf_l2 = false;
  int smote_k = 5;
  bool allow_densify = true;  // sparse features + smote: densify with a warning

  double nb_alpha = 1.0;
  LogRegParams logreg;
  SvmParams svm;
  ForestParams forest;
  LstmHyper lstm;

  // Rejects contradictory combinations (the recurrent model requires
  // glove-seq features and vice versa, smote needs interpolatable rows,
  // glove features need a vector file, ...).
  void validate() const;
};

// JSON round-trip for configuration files. Parsing starts from the defaults
// above, so partial files are fine; unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_json(const RunConfig& config);

struct RunResult {
  EvalReport report;
  ModelArtifact artifact;
  size_t n_train = 0;  // rows after resampling
  size_t n_test = 0;
  std::vector<double> epoch_losses;  // iterative models only
  double train_seconds = 0.0;
};

// Full training pipeline: task filtering, preprocessing, an 80:20 stratified
// split (or an external test file), vocabulary and features from the
// training fold only, optional resampling of the training fold (never the
// evaluation fold), model training, evaluation, artifact assembly.
RunResult run_training(const RunConfig& config, const std::vector<LabeledExample>& data,
                       const std::vector<LabeledExample>* external_test = nullptr,
                       std::ostream* log = nullptr);

}  // namespace olidtk
