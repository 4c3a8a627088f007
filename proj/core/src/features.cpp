#include "olidtk/features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "olidtk/errors.hpp"

namespace olidtk {

Vocabulary build_vocabulary(const std::vector<TokenSeq>& corpus, int min_df) {
  if (corpus.empty()) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
  if (min_df < 1) throw ConfigError("min_df must be >= 1");

  std::unordered_map<std::string, int> df;
  std::vector<std::string> first_seen;  // corpus order
  for (const TokenSeq& doc : corpus) {
    std::unordered_set<std::string> seen;
    for (const std::string& tok : doc) {
      if (!seen.insert(tok).second) continue;
      auto [it, fresh] = df.try_emplace(tok, 0);
      if (fresh) first_seen.push_back(tok);
      ++it->second;
    }
  }

  Vocabulary vocab;
  vocab.n_docs = corpus.size();
  for (std::string& tok : first_seen) {
    int d = df[tok];
    if (d < min_df) continue;
    int id = static_cast<int>(vocab.tokens.size());
    vocab.index.emplace(tok, id);
    vocab.tokens.push_back(std::move(tok));
    vocab.df.push_back(d);
  }
  return vocab;
}

SparseVector count_vectorize(const TokenSeq& tokens, const Vocabulary& vocab) {
  std::map<int, double> counts;  // ordered -> sorted entries for free
  for (const std::string& tok : tokens) {
    if (auto id = vocab.id_of(tok)) counts[*id] += 1.0;
  }
  SparseVector out;
  out.dim = vocab.size();
  out.entries.assign(counts.begin(), counts.end());
  return out;
}

SparseVector tfidf_vectorize(const TokenSeq& tokens, const Vocabulary& vocab,
                             bool l2_normalize) {
  if (vocab.n_docs < 1) throw EmptyCorpus("vocabulary has no documents");
  SparseVector out = count_vectorize(tokens, vocab);
  const double n = static_cast<double>(vocab.n_docs);

  std::vector<std::pair<int, double>> weighted;
  weighted.reserve(out.entries.size());
  for (const auto& [id, tf] : out.entries) {
    double idf = std::log(n / static_cast<double>(vocab.df[static_cast<size_t>(id)]));
    if (idf == 0.0) continue;  // token occurs in every training document
    weighted.emplace_back(id, tf * idf);
  }
  out.entries = std::move(weighted);

  if (l2_normalize) {
    double sq = 0.0;
    for (const auto& [id, w] : out.entries) sq += w * w;
    if (sq > 0.0) {
      double inv = 1.0 / std::sqrt(sq);
      for (auto& [id, w] : out.entries) w *= inv;
    }
  }
  return out;
}

void EmbeddingTable::insert(std::string token, DenseVector v) {
  if (v.size() != dim_)
    throw DataError("embedding vector for '" + token + "' has wrong dimension");
  vectors_[std::move(token)] = std::move(v);
}

const DenseVector* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingTable load_glove(const std::string& path, int dim,
                          const std::unordered_set<std::string>* restrict_to) {
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);

  EmbeddingTable table(dim);
  std::string line;
  size_t line_no = 0;
  DenseVector v(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    size_t sp = line.find(' ');
    if (sp == std::string::npos)
      throw DimensionMismatch(path, line_no, "expected token followed by components");
    std::string token = line.substr(0, sp);

    bool wanted = restrict_to == nullptr || restrict_to->count(token) > 0;

    int count = 0;
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      const char* field_end = p;
      while (field_end < end && *field_end != ' ') ++field_end;
      if (count >= dim) {
        ++count;  // too many components; keep counting for the message
      } else {
        double value = 0.0;
        auto [next, ec] = std::from_chars(p, field_end, value);
        if (ec != std::errc() || next != field_end)
          throw ParseError(path, line_no,
                           "non-numeric component '" + std::string(p, field_end) + "'");
        v[count++] = value;
      }
      p = field_end;
    }
    if (count != dim)
      throw DimensionMismatch(path, line_no,
                              "expected " + std::to_string(dim) + " components, got " +
                                  std::to_string(count));
    if (wanted) table.insert(std::move(token), v);
  }
  return table;
}

DenseVector embed_average(const TokenSeq& tokens, const EmbeddingTable& table) {
  DenseVector sum = DenseVector::Zero(table.dim());
  int found = 0;
  for (const std::string& tok : tokens) {
    if (const DenseVector* v = table.find(tok)) {
      sum += *v;
      ++found;
    }
  }
  if (found > 0) sum /= static_cast<double>(found);
  return sum;
}

PaddedSequence encode_sequence(const TokenSeq& tokens, const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  PaddedSequence seq;
  seq.ids.assign(static_cast<size_t>(max_len), kPadId);
  const size_t n = std::min(tokens.size(), static_cast<size_t>(max_len));
  for (size_t i = 0; i < n; ++i) {
    auto id = vocab.id_of(tokens[i]);
    seq.ids[i] = id ? *id + 2 : kOovId;
  }
  return seq;
}

}  // namespace olidtk
