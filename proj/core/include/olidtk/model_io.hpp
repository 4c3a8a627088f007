#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "olidtk/corpus.hpp"
#include "olidtk/features.hpp"
#include "olidtk/forest.hpp"
#include "olidtk/linear.hpp"
#include "olidtk/lstm.hpp"
#include "olidtk/naive_bayes.hpp"
#include "olidtk/preprocess.hpp"

namespace olidtk {

inline constexpr int kArtifactFormatVersion = 1;

// Everything the feature stage needs to rebuild test-time vectors.
struct FeatureSettings {
  std::string kind = "tfidf";  // count | tfidf | glove-avg | glove-seq
  int min_df = 1;
  int max_len = 60;
  bool tfidf_l2 = false;
  int embedding_dim = 0;  // glove-avg only
};

// A trained model plus the full preprocessing and feature state, so that
// prediction needs nothing but the artifact file and raw text.
struct ModelArtifact {
  std::string model_kind;  // nb | logreg | svm | forest | lstm
  TaskId task = TaskId::A;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::string>> emoji_entries;
  FeatureSettings features;
  Vocabulary vocab;
  EmbeddingTable embeddings;  // glove-avg: the vectors used at train time
  std::variant<NBModel, LinearModel, ForestModel, LstmModel> model;
  std::string config_echo = "{}";  // training configuration, JSON text

  EmojiMap emoji_map() const;
  int predict(const std::string& raw_text, std::optional<double>* probability = nullptr) const;
};

// Binary container: magic, format version, a JSON header describing the
// shapes, then raw little-endian float64 blocks. Byte-identical for
// identical inputs (no timestamps). See docs/model_format.md.
void save_artifact(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_artifact(const std::string& path);

}  // namespace olidtk
