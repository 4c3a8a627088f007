#include "olidtk/pipeline.hpp"

#include <chrono>
#include <nlohmann/json.hpp>
#include <ostream>
#include <unordered_set>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"
#include "olidtk/sampling.hpp"

namespace olidtk {

namespace {

using ordered_json = nlohmann::ordered_json;

// Stream ids for seed derivation; training itself consumes the base seed.
constexpr uint64_t kSamplingStream = 1000003;

const std::unordered_set<std::string>& model_names() {
  static const std::unordered_set<std::string> names = {"nb", "logreg", "svm", "forest", "lstm"};
  return names;
}
const std::unordered_set<std::string>& feature_names() {
  static const std::unordered_set<std::string> names = {"count", "tfidf", "glove-avg",
                                                        "glove-seq"};
  return names;
}
const std::unordered_set<std::string>& sampling_names() {
  static const std::unordered_set<std::string> names = {"none", "undersample", "oversample",
                                                        "smote"};
  return names;
}

void check_keys(const ordered_json& obj, const std::unordered_set<std::string>& known,
                const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown configuration key '" + where + key + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (!model_names().count(model)) throw ConfigError("unknown model '" + model + "'");
  if (!feature_names().count(features)) throw ConfigError("unknown features '" + features + "'");
  if (!sampling_names().count(sampling)) throw ConfigError("unknown sampling '" + sampling + "'");

  if ((model == "lstm") != (features == "glove-seq"))
    throw ConfigError("glove-seq features and the lstm model require each other");
  if (model == "nb" && features == "glove-avg")
    throw ConfigError("naive Bayes needs non-negative features (count or tfidf)");
  if (features == "glove-avg" && !glove_path)
    throw ConfigError("glove-avg features need --glove with a vector file");
  if (model == "lstm" && sampling == "smote")
    throw ConfigError("smote cannot interpolate token sequences; use random oversampling");
  if (sampling == "smote" && (features == "count" || features == "tfidf") && !allow_densify)
    throw ConfigError("smote needs dense rows; enable densification or change sampling");

  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    throw ConfigError("train fraction must be inside (0, 1)");
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (smote_k < 1) throw ConfigError("smote k must be >= 1");
  if (glove_dim < 1) throw ConfigError("glove dimension must be >= 1");
  if (nb_alpha <= 0.0) throw ConfigError("naive Bayes alpha must be > 0");
}

RunConfig parse_run_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

  static const std::unordered_set<std::string> top_keys = {
      "task",   "model",  "features", "sampling",       "split",  "seed",
      "glove",  "glove_dim", "emoji_map", "min_df",     "max_len", "tfidf_l2",
      "smote_k", "allow_densify", "nb_alpha", "logreg", "svm",    "forest",
      "lstm"};
  check_keys(j, top_keys, "");

  RunConfig cfg;
  try {
    if (j.contains("task")) cfg.task = parse_task(j["task"].get<std::string>());
    if (j.contains("model")) cfg.model = j["model"].get<std::string>();
    if (j.contains("features")) cfg.features = j["features"].get<std::string>();
    if (j.contains("sampling")) cfg.sampling = j["sampling"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("glove")) cfg.glove_path = j["glove"].get<std::string>();
    if (j.contains("glove_dim")) cfg.glove_dim = j["glove_dim"].get<int>();
    if (j.contains("emoji_map")) cfg.emoji_map_path = j["emoji_map"].get<std::string>();
    if (j.contains("min_df")) cfg.min_df = j["min_df"].get<int>();
    if (j.contains("max_len")) cfg.max_len = j["max_len"].get<int>();
    if (j.contains("tfidf_l2")) cfg.tfidf_l2 = j["tfidf_l2"].get<bool>();
    if (j.contains("smote_k")) cfg.smote_k = j["smote_k"].get<int>();
    if (j.contains("allow_densify")) cfg.allow_densify = j["allow_densify"].get<bool>();
    if (j.contains("nb_alpha")) cfg.nb_alpha = j["nb_alpha"].get<double>();

    if (j.contains("split")) {
      const auto& s = j["split"];
      check_keys(s, {"train_fraction", "seed", "stratified"}, "split.");
      if (s.contains("train_fraction")) cfg.split.train_fraction = s["train_fraction"].get<double>();
      if (s.contains("seed")) cfg.split.seed = s["seed"].get<uint64_t>();
      if (s.contains("stratified")) cfg.split.stratified = s["stratified"].get<bool>();
    }
    if (j.contains("logreg")) {
      const auto& s = j["logreg"];
      check_keys(s, {"lr", "epochs", "l2", "batch_size"}, "logreg.");
      if (s.contains("lr")) cfg.logreg.lr = s["lr"].get<double>();
      if (s.contains("epochs")) cfg.logreg.epochs = s["epochs"].get<int>();
      if (s.contains("l2")) cfg.logreg.l2 = s["l2"].get<double>();
      if (s.contains("batch_size")) cfg.logreg.batch_size = s["batch_size"].get<int>();
    }
    if (j.contains("svm")) {
      const auto& s = j["svm"];
      check_keys(s, {"reg_lambda", "epochs", "gamma", "degree"}, "svm.");
      if (s.contains("reg_lambda")) cfg.svm.reg_lambda = s["reg_lambda"].get<double>();
      if (s.contains("epochs")) cfg.svm.epochs = s["epochs"].get<int>();
      if (s.contains("gamma")) {
        if (s["gamma"].is_string()) {
          if (s["gamma"].get<std::string>() != "auto")
            throw ConfigError("svm.gamma must be a number or \"auto\"");
          cfg.svm.gamma = -1.0;
        } else {
          cfg.svm.gamma = s["gamma"].get<double>();
        }
      }
      if (s.contains("degree")) cfg.svm.degree = s["degree"].get<int>();
    }
    if (j.contains("forest")) {
      const auto& s = j["forest"];
      check_keys(s, {"n_trees", "max_depth", "features_per_split"}, "forest.");
      if (s.contains("n_trees")) cfg.forest.n_trees = s["n_trees"].get<int>();
      if (s.contains("max_depth")) cfg.forest.max_depth = s["max_depth"].get<int>();
      if (s.contains("features_per_split"))
        cfg.forest.features_per_split = s["features_per_split"].get<int>();
    }
    if (j.contains("lstm")) {
      const auto& s = j["lstm"];
      check_keys(s,
                 {"embed_dim", "hidden_dim", "dense_dim", "batch_size", "epochs", "lr",
                  "embeddings_trainable", "bidirectional", "grad_clip_norm"},
                 "lstm.");
      if (s.contains("embed_dim")) cfg.lstm.embed_dim = s["embed_dim"].get<int>();
      if (s.contains("hidden_dim")) cfg.lstm.hidden_dim = s["hidden_dim"].get<int>();
      if (s.contains("dense_dim")) cfg.lstm.dense_dim = s["dense_dim"].get<int>();
      if (s.contains("batch_size")) cfg.lstm.batch_size = s["batch_size"].get<int>();
      if (s.contains("epochs")) cfg.lstm.epochs = s["epochs"].get<int>();
      if (s.contains("lr")) cfg.lstm.lr = s["lr"].get<double>();
      if (s.contains("embeddings_trainable"))
        cfg.lstm.embeddings_trainable = s["embeddings_trainable"].get<bool>();
      if (s.contains("bidirectional")) cfg.lstm.bidirectional = s["bidirectional"].get<bool>();
      if (s.contains("grad_clip_norm")) cfg.lstm.grad_clip_norm = s["grad_clip_norm"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  ordered_json j;
  j["task"] = task_name(cfg.task);
  j["model"] = cfg.model;
  j["features"] = cfg.features;
  j["sampling"] = cfg.sampling;
  j["split"] = {{"train_fraction", cfg.split.train_fraction},
                {"seed", cfg.split.seed},
                {"stratified", cfg.split.stratified}};
  j["seed"] = cfg.seed;
  if (cfg.glove_path) j["glove"] = *cfg.glove_path;
  j["glove_dim"] = cfg.glove_dim;
  if (cfg.emoji_map_path) j["emoji_map"] = *cfg.emoji_map_path;
  j["min_df"] = cfg.min_df;
  j["max_len"] = cfg.max_len;
  j["tfidf_l2"] = cfg.tfidf_l2;
  j["smote_k"] = cfg.smote_k;
  j["allow_densify"] = cfg.allow_densify;
  j["nb_alpha"] = cfg.nb_alpha;
  j["logreg"] = {{"lr", cfg.logreg.lr},
                 {"epochs", cfg.logreg.epochs},
                 {"l2", cfg.logreg.l2},
                 {"batch_size", cfg.logreg.batch_size}};
  j["svm"] = {{"reg_lambda", cfg.svm.reg_lambda}, {"epochs", cfg.svm.epochs}};
  if (cfg.svm.gamma < 0.0)
    j["svm"]["gamma"] = "auto";
  else
    j["svm"]["gamma"] = cfg.svm.gamma;
  j["svm"]["degree"] = cfg.svm.degree;
  j["forest"] = {{"n_trees", cfg.forest.n_trees},
                 {"max_depth", cfg.forest.max_depth},
                 {"features_per_split", cfg.forest.features_per_split}};
  j["lstm"] = {{"embed_dim", cfg.lstm.embed_dim},
               {"hidden_dim", cfg.lstm.hidden_dim},
               {"dense_dim", cfg.lstm.dense_dim},
               {"batch_size", cfg.lstm.batch_size},
               {"epochs", cfg.lstm.epochs},
               {"lr", cfg.lstm.lr},
               {"embeddings_trainable", cfg.lstm.embeddings_trainable},
               {"bidirectional", cfg.lstm.bidirectional},
               {"grad_clip_norm", cfg.lstm.grad_clip_norm}};
  return j.dump();
}

RunResult run_training(const RunConfig& config, const std::vector<LabeledExample>& data,
                       const std::vector<LabeledExample>* external_test, std::ostream* log) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const EmojiMap emojis =
      config.emoji_map_path ? EmojiMap::load(*config.emoji_map_path) : EmojiMap::builtin();
  const std::vector<std::string>& classes = task_classes(config.task);
  const int n_classes = static_cast<int>(classes.size());

  std::vector<TaskInstance> train_set, test_set;
  if (external_test) {
    train_set = task_subset(data, config.task);
    test_set = task_subset(*external_test, config.task);
    if (test_set.empty()) throw EmptyCorpus("external test file has no rows for this task");
  } else {
    std::tie(train_set, test_set) = split_train_test(task_subset(data, config.task), config.split);
    if (test_set.empty()) throw TooFewExamples("the split left no test rows");
  }
  if (train_set.empty()) throw EmptyCorpus("no training rows for this task");

  std::vector<TokenSeq> train_tokens, test_tokens;
  train_tokens.reserve(train_set.size());
  for (const TaskInstance& ti : train_set) train_tokens.push_back(preprocess_pipeline(ti.text, emojis));
  test_tokens.reserve(test_set.size());
  for (const TaskInstance& ti : test_set) test_tokens.push_back(preprocess_pipeline(ti.text, emojis));

  std::vector<int> train_labels, test_labels;
  for (const TaskInstance& ti : train_set) train_labels.push_back(ti.label);
  for (const TaskInstance& ti : test_set) test_labels.push_back(ti.label);

  const Vocabulary vocab = build_vocabulary(train_tokens, config.min_df);
  if (log)
    *log << "task " << task_name(config.task) << ": " << train_set.size() << " train / "
         << test_set.size() << " test rows, vocabulary " << vocab.size() << "\n";

  RunResult result;
  ModelArtifact& artifact = result.artifact;
  artifact.model_kind = config.model;
  artifact.task = config.task;
  artifact.classes = classes;
  artifact.emoji_entries = emojis.entries();
  artifact.features.kind = config.features;
  artifact.features.min_df = config.min_df;
  artifact.features.max_len = config.max_len;
  artifact.features.tfidf_l2 = config.tfidf_l2;
  artifact.vocab = vocab;
  RunConfig echo_cfg = config;
  if (echo_cfg.model == "svm" && echo_cfg.svm.gamma < 0.0) {
    const size_t dim =
        config.features == "glove-avg" ? static_cast<size_t>(config.glove_dim) : vocab.size();
    if (dim > 0) echo_cfg.svm.gamma = 1.0 / static_cast<double>(dim);
  }
  artifact.config_echo = run_config_json(echo_cfg);

  const uint64_t sampling_seed = mix_seed(config.seed, kSamplingStream);
  std::vector<int> predictions;
  predictions.reserve(test_set.size());

  if (config.model == "lstm") {
    std::unordered_set<std::string> keep(vocab.tokens.begin(), vocab.tokens.end());
    EmbeddingTable glove;
    if (config.glove_path) glove = load_glove(*config.glove_path, config.glove_dim, &keep);

    LstmConfig lc;
    lc.vocab_size = vocab.size();
    lc.embed_dim = config.glove_path ? config.glove_dim : config.lstm.embed_dim;
    lc.hidden_dim = config.lstm.hidden_dim;
    lc.max_len = config.max_len;
    lc.dense_dim = config.lstm.dense_dim;
    lc.n_outputs = n_classes == 2 ? 1 : n_classes;
    lc.lr = config.lstm.lr;
    lc.epochs = config.lstm.epochs;
    lc.batch_size = config.lstm.batch_size;
    lc.seed = config.seed;
    lc.embedding_init = config.glove_path ? EmbeddingInit::GloveTable : EmbeddingInit::Random;
    lc.embeddings_trainable = config.lstm.embeddings_trainable;
    lc.bidirectional = config.lstm.bidirectional;
    lc.grad_clip_norm = config.lstm.grad_clip_norm;

    std::vector<PaddedSequence> train_seqs, test_seqs;
    train_seqs.reserve(train_tokens.size());
    for (const TokenSeq& t : train_tokens) train_seqs.push_back(encode_sequence(t, vocab, config.max_len));
    test_seqs.reserve(test_tokens.size());
    for (const TokenSeq& t : test_tokens) test_seqs.push_back(encode_sequence(t, vocab, config.max_len));

    std::vector<int> labels = train_labels;
    if (config.sampling == "undersample" || config.sampling == "oversample") {
      const std::vector<size_t> idx =
          config.sampling == "undersample"
              ? undersample_indices(train_labels, n_classes, sampling_seed)
              : oversample_indices(train_labels, n_classes, sampling_seed);
      std::vector<PaddedSequence> seqs;
      std::vector<int> lab;
      seqs.reserve(idx.size());
      lab.reserve(idx.size());
      for (size_t i : idx) {
        seqs.push_back(train_seqs[i]);
        lab.push_back(train_labels[i]);
      }
      train_seqs = std::move(seqs);
      labels = std::move(lab);
    }
    result.n_train = train_seqs.size();

    LstmTrainLog train_log;
    LstmModel model = lstm_train(train_seqs, labels, lc,
                                 config.glove_path ? &glove : nullptr, &vocab, &train_log);
    result.epoch_losses = train_log.epoch_mean_loss;
    if (log)
      for (size_t e = 0; e < train_log.epoch_mean_loss.size(); ++e)
        *log << "epoch " << (e + 1) << " mean loss " << train_log.epoch_mean_loss[e] << "\n";

    for (const PaddedSequence& seq : test_seqs) predictions.push_back(lstm_predict(model, seq));
    artifact.model = std::move(model);
  } else {
    FeatureDataset train_ds, test_ds;
    train_ds.n_classes = test_ds.n_classes = n_classes;
    train_ds.labels = train_labels;
    test_ds.labels = test_labels;

    EmbeddingTable glove;
    if (config.features == "glove-avg") {
      std::unordered_set<std::string> keep(vocab.tokens.begin(), vocab.tokens.end());
      glove = load_glove(*config.glove_path, config.glove_dim, &keep);
      artifact.features.embedding_dim = config.glove_dim;
      for (const TokenSeq& t : train_tokens) train_ds.dense_rows.push_back(embed_average(t, glove));
      for (const TokenSeq& t : test_tokens) test_ds.dense_rows.push_back(embed_average(t, glove));
    } else if (config.features == "count") {
      for (const TokenSeq& t : train_tokens) train_ds.sparse_rows.push_back(count_vectorize(t, vocab));
      for (const TokenSeq& t : test_tokens) test_ds.sparse_rows.push_back(count_vectorize(t, vocab));
    } else {
      for (const TokenSeq& t : train_tokens)
        train_ds.sparse_rows.push_back(tfidf_vectorize(t, vocab, config.tfidf_l2));
      for (const TokenSeq& t : test_tokens)
        test_ds.sparse_rows.push_back(tfidf_vectorize(t, vocab, config.tfidf_l2));
    }

    if (config.sampling == "undersample") {
      train_ds = random_undersample(train_ds, sampling_seed);
    } else if (config.sampling == "oversample") {
      train_ds = random_oversample(train_ds, sampling_seed);
    } else if (config.sampling == "smote") {
      if (train_ds.is_sparse()) {
        if (log)
          *log << "warning: densifying " << train_ds.size() << " x " << train_ds.dim()
               << " rows for smote\n";
        train_ds = densify(train_ds);
      }
      train_ds = smote(train_ds, config.smote_k, sampling_seed);
    }
    result.n_train = train_ds.size();

    if (config.model == "nb") {
      NBModel model = nb_train(train_ds, config.nb_alpha);
      for (size_t i = 0; i < test_ds.size(); ++i) predictions.push_back(nb_predict(model, test_ds.row(i)));
      artifact.model = std::move(model);
    } else if (config.model == "logreg" || config.model == "svm") {
      LinearModel model = config.model == "logreg"
                              ? logreg_train(train_ds, config.logreg, config.seed)
                              : svm_train(train_ds, config.svm, config.seed);
      for (size_t i = 0; i < test_ds.size(); ++i)
        predictions.push_back(linear_predict(model, test_ds.row(i)));
      artifact.model = std::move(model);
    } else {
      ForestModel model = forest_train(train_ds, config.forest, config.seed);
      for (size_t i = 0; i < test_ds.size(); ++i)
        predictions.push_back(forest_predict(model, test_ds.row(i)));
      artifact.model = std::move(model);
    }
    if (config.features == "glove-avg") artifact.embeddings = std::move(glove);
  }

  result.n_test = test_set.size();
  result.report = report(test_labels, predictions, classes);
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (log)
    *log << "accuracy " << result.report.accuracy << ", macro f1 " << result.report.macro_f1
         << " (" << result.train_seconds << "s)\n";
  return result;
}

}  // namespace olidtk
