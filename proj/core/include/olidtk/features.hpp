#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "olidtk/preprocess.hpp"

namespace olidtk {

using DenseVector = Eigen::VectorXd;

// Token -> dense id plus document frequencies, built from training
// documents only. Ids follow first-occurrence order over the corpus.
struct Vocabulary {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> tokens;  // id -> token
  std::vector<int> df;              // id -> number of documents containing the token
  size_t n_docs = 0;

  int size() const { return static_cast<int>(tokens.size()); }
  std::optional<int> id_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// Keeps tokens whose document frequency is at least min_df. A token
// repeated within one document counts once toward df.
Vocabulary build_vocabulary(const std::vector<TokenSeq>& corpus, int min_df = 1);

// Sorted (id, value) pairs with no explicit zeros.
struct SparseVector {
  std::vector<std::pair<int, double>> entries;
  int dim = 0;

  double at(int id) const {
    for (const auto& [i, v] : entries)
      if (i == id) return v;
    return 0.0;
  }
};

// Raw occurrence counts over the vocabulary; out-of-vocabulary tokens are
// ignored.
SparseVector count_vectorize(const TokenSeq& tokens, const Vocabulary& vocab);

// w = tf * ln(N / df). Tokens present in every training document get weight
// zero and are omitted. Optional L2 row normalization (off by default).
SparseVector tfidf_vectorize(const TokenSeq& tokens, const Vocabulary& vocab,
                             bool l2_normalize = false);

class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  void insert(std::string token, DenseVector v);
  const DenseVector* find(const std::string& token) const;

 private:
  int dim_;
  std::unordered_map<std::string, DenseVector> vectors_;
};

// GloVe text format: one "token v1 ... v_dim" per line, space separated.
// When restrict_to is given, only those tokens are kept (bounds memory when
// loading the full pretrained files). Errors carry the offending line.
EmbeddingTable load_glove(const std::string& path, int dim,
                          const std::unordered_set<std::string>* restrict_to = nullptr);

// Componentwise mean over the tokens present in the table; a document with
// no known token maps to the zero vector.
DenseVector embed_average(const TokenSeq& tokens, const EmbeddingTable& table);

inline constexpr int kPadId = 0;
inline constexpr int kOovId = 1;

// Fixed-length token-id sequence for the recurrent model: vocabulary ids
// shifted by 2 (0 = padding, 1 = out-of-vocabulary), post-padded, truncated
// to the first max_len tokens.
struct PaddedSequence {
  std::vector<int> ids;

  int real_length() const {
    int n = 0;
    while (n < static_cast<int>(ids.size()) && ids[n] != kPadId) ++n;
    return n;
  }
};

PaddedSequence encode_sequence(const TokenSeq& tokens, const Vocabulary& vocab, int max_len);

}  // namespace olidtk
