#include "olidtk/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "olidtk/errors.hpp"

namespace olidtk {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'O', 'L', 'T', 'K'};

void append_u64_le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64_le(std::string& out, double d) {
  uint64_t bits = std::bit_cast<uint64_t>(d);
  append_u64_le(out, bits);
}

uint64_t read_u64_le(const char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

// Header block list plus a payload of row-major little-endian float64.
struct BlockWriter {
  ordered_json blocks = ordered_json::array();
  std::string payload;

  void add(const std::string& name, const Eigen::MatrixXd& m) {
    blocks.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    payload.reserve(payload.size() + static_cast<size_t>(m.size()) * 8);
    for (long r = 0; r < m.rows(); ++r)
      for (long c = 0; c < m.cols(); ++c) append_f64_le(payload, m(r, c));
  }

  void add(const std::string& name, const Eigen::VectorXd& v) {
    blocks.push_back({{"name", name}, {"rows", v.size()}, {"cols", 1}});
    for (long i = 0; i < v.size(); ++i) append_f64_le(payload, v[i]);
  }
};

struct BlockReader {
  std::vector<std::pair<std::string, Eigen::MatrixXd>> blocks;

  const Eigen::MatrixXd& matrix(const std::string& name) const {
    for (const auto& [n, m] : blocks)
      if (n == name) return m;
    throw CorruptArtifact("missing tensor block '" + name + "'");
  }
  Eigen::VectorXd vector(const std::string& name) const {
    const Eigen::MatrixXd& m = matrix(name);
    if (m.cols() != 1) throw CorruptArtifact("tensor block '" + name + "' is not a vector");
    return m.col(0);
  }
};

BlockReader read_blocks(const ordered_json& header, const std::string& payload) {
  BlockReader reader;
  size_t offset = 0;
  for (const auto& b : header.at("blocks")) {
    const std::string name = b.at("name").get<std::string>();
    const long rows = b.at("rows").get<long>();
    const long cols = b.at("cols").get<long>();
    const size_t bytes = static_cast<size_t>(rows) * static_cast<size_t>(cols) * 8;
    if (offset + bytes > payload.size())
      throw CorruptArtifact("tensor payload shorter than the header promises");
    Eigen::MatrixXd m(rows, cols);
    const char* p = payload.data() + offset;
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) {
        m(r, c) = std::bit_cast<double>(read_u64_le(p));
        p += 8;
      }
    offset += bytes;
    reader.blocks.emplace_back(name, std::move(m));
  }
  if (offset != payload.size())
    throw CorruptArtifact("trailing bytes after the last tensor block");
  return reader;
}

template <typename CellT, typename Fn>
void visit_cell_matrices(const std::string& prefix, CellT& cell, Fn&& fn) {
  fn(prefix + ".w_in", cell.w_in);
  fn(prefix + ".w_forget", cell.w_forget);
  fn(prefix + ".w_out", cell.w_out);
  fn(prefix + ".w_cand", cell.w_cand);
  fn(prefix + ".u_in", cell.u_in);
  fn(prefix + ".u_forget", cell.u_forget);
  fn(prefix + ".u_out", cell.u_out);
  fn(prefix + ".u_cand", cell.u_cand);
  fn(prefix + ".b_in", cell.b_in);
  fn(prefix + ".b_forget", cell.b_forget);
  fn(prefix + ".b_out", cell.b_out);
  fn(prefix + ".b_cand", cell.b_cand);
}

template <typename ParamsT, typename Fn>
void visit_lstm_matrices(ParamsT& p, bool bidirectional, Fn&& fn) {
  fn("embedding", p.embedding);
  visit_cell_matrices("fwd", p.fwd, fn);
  if (bidirectional) visit_cell_matrices("bwd", p.bwd, fn);
  fn("dense_w", p.dense_w);
  fn("dense_b", p.dense_b);
  fn("out_w", p.out_w);
  fn("out_b", p.out_b);
}

std::string embedding_init_name(EmbeddingInit init) {
  return init == EmbeddingInit::GloveTable ? "glove-table" : "random";
}

EmbeddingInit parse_embedding_init(const std::string& name) {
  if (name == "glove-table") return EmbeddingInit::GloveTable;
  if (name == "random") return EmbeddingInit::Random;
  throw CorruptArtifact("unknown embedding init '" + name + "'");
}

int to_int(double d) { return static_cast<int>(std::llround(d)); }

}  // namespace

EmojiMap ModelArtifact::emoji_map() const {
  EmojiMap map;
  for (const auto& [emoji, phrase] : emoji_entries) map.add(emoji, phrase);
  return map;
}

void save_artifact(const ModelArtifact& artifact, const std::string& path) {
  ordered_json header;
  header["format"] = "olidtk-model";
  header["format_version"] = kArtifactFormatVersion;
  header["model"] = artifact.model_kind;
  header["task"] = task_name(artifact.task);
  header["classes"] = artifact.classes;
  ordered_json emoji = ordered_json::array();
  for (const auto& [e, p] : artifact.emoji_entries) emoji.push_back({e, p});
  header["emoji_map"] = std::move(emoji);
  header["features"] = {{"kind", artifact.features.kind},
                        {"min_df", artifact.features.min_df},
                        {"max_len", artifact.features.max_len},
                        {"tfidf_l2", artifact.features.tfidf_l2},
                        {"embedding_dim", artifact.features.embedding_dim}};
  header["vocab"] = {{"n_docs", artifact.vocab.n_docs},
                     {"tokens", artifact.vocab.tokens},
                     {"df", artifact.vocab.df}};

  BlockWriter writer;
  ordered_json params;
  if (const auto* nb = std::get_if<NBModel>(&artifact.model)) {
    params = {{"alpha", nb->alpha}, {"n_classes", nb->n_classes()}};
    writer.add("log_prior", nb->log_prior);
    writer.add("log_likelihood", nb->log_likelihood);
  } else if (const auto* lin = std::get_if<LinearModel>(&artifact.model)) {
    params = {{"n_classes", lin->n_classes}};
    writer.add("weights", lin->weights);
    writer.add("bias", lin->bias);
  } else if (const auto* forest = std::get_if<ForestModel>(&artifact.model)) {
    params = {{"n_trees", forest->trees.size()}, {"n_classes", forest->n_classes}};
    for (size_t t = 0; t < forest->trees.size(); ++t) {
      const std::vector<TreeNode>& nodes = forest->trees[t].nodes;
      Eigen::MatrixXd m(static_cast<long>(nodes.size()), 5);
      for (size_t i = 0; i < nodes.size(); ++i) {
        m(static_cast<long>(i), 0) = nodes[i].feature;
        m(static_cast<long>(i), 1) = nodes[i].threshold;
        m(static_cast<long>(i), 2) = nodes[i].left;
        m(static_cast<long>(i), 3) = nodes[i].right;
        m(static_cast<long>(i), 4) = nodes[i].leaf_class;
      }
      writer.add("tree_" + std::to_string(t), m);
    }
  } else {
    const auto& lstm = std::get<LstmModel>(artifact.model);
    const LstmConfig& c = lstm.config;
    params = {{"vocab_size", c.vocab_size},
              {"embed_dim", c.embed_dim},
              {"hidden_dim", c.hidden_dim},
              {"max_len", c.max_len},
              {"dense_dim", c.dense_dim},
              {"n_outputs", c.n_outputs},
              {"lr", c.lr},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"embedding_init", embedding_init_name(c.embedding_init)},
              {"embeddings_trainable", c.embeddings_trainable},
              {"bidirectional", c.bidirectional},
              {"grad_clip_norm", c.grad_clip_norm}};
    visit_lstm_matrices(lstm.params, c.bidirectional,
                        [&writer](const std::string& name, const auto& tensor) {
                          writer.add(name, tensor);
                        });
  }

  if (artifact.embeddings.size() > 0) {
    std::vector<std::string> found;
    for (const std::string& token : artifact.vocab.tokens)
      if (artifact.embeddings.find(token)) found.push_back(token);
    Eigen::MatrixXd vectors(static_cast<long>(found.size()), artifact.embeddings.dim());
    for (size_t i = 0; i < found.size(); ++i)
      vectors.row(static_cast<long>(i)) = artifact.embeddings.find(found[i])->transpose();
    header["embedding_tokens"] = found;
    header["embedding_dim"] = artifact.embeddings.dim();
    writer.add("embedding_vectors", vectors);
  }

  header["params"] = std::move(params);
  header["blocks"] = std::move(writer.blocks);
  header["config"] = ordered_json::parse(artifact.config_echo);

  const std::string header_text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  std::string lengths;
  for (int i = 0; i < 4; ++i)
    lengths.push_back(static_cast<char>((static_cast<uint32_t>(kArtifactFormatVersion) >> (8 * i)) & 0xff));
  append_u64_le(lengths, header_text.size());
  out.write(lengths.data(), static_cast<long>(lengths.size()));
  out.write(header_text.data(), static_cast<long>(header_text.size()));
  out.write(writer.payload.data(), static_cast<long>(writer.payload.size()));
  if (!out) throw DataError("short write to '" + path + "'");
}

ModelArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CorruptArtifact("'" + path + "' is not a model file");
  uint32_t version = 0;
  for (int i = 0; i < 4; ++i)
    version |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[4 + static_cast<size_t>(i)]))
               << (8 * i);
  if (version != static_cast<uint32_t>(kArtifactFormatVersion))
    throw VersionMismatch("model format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kArtifactFormatVersion) + ")");
  const uint64_t header_len = read_u64_le(bytes.data() + 8);
  if (16 + header_len > bytes.size()) throw CorruptArtifact("truncated model header");

  ordered_json header;
  try {
    header = ordered_json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArtifact(std::string("bad model header: ") + e.what());
  }
  const std::string payload = bytes.substr(16 + header_len);

  try {
    ModelArtifact artifact;
    artifact.model_kind = header.at("model").get<std::string>();
    artifact.task = parse_task(header.at("task").get<std::string>());
    artifact.classes = header.at("classes").get<std::vector<std::string>>();
    for (const auto& pair : header.at("emoji_map"))
      artifact.emoji_entries.emplace_back(pair.at(0).get<std::string>(),
                                          pair.at(1).get<std::string>());
    const auto& feat = header.at("features");
    artifact.features.kind = feat.at("kind").get<std::string>();
    artifact.features.min_df = feat.at("min_df").get<int>();
    artifact.features.max_len = feat.at("max_len").get<int>();
    artifact.features.tfidf_l2 = feat.at("tfidf_l2").get<bool>();
    artifact.features.embedding_dim = feat.at("embedding_dim").get<int>();
    const auto& voc = header.at("vocab");
    artifact.vocab.n_docs = voc.at("n_docs").get<size_t>();
    artifact.vocab.tokens = voc.at("tokens").get<std::vector<std::string>>();
    artifact.vocab.df = voc.at("df").get<std::vector<int>>();
    for (size_t i = 0; i < artifact.vocab.tokens.size(); ++i)
      artifact.vocab.index[artifact.vocab.tokens[i]] = static_cast<int>(i);
    artifact.config_echo = header.at("config").dump();

    BlockReader reader = read_blocks(header, payload);
    const ordered_json& params = header.at("params");
    if (artifact.model_kind == "nb") {
      NBModel nb;
      nb.alpha = params.at("alpha").get<double>();
      nb.log_prior = reader.vector("log_prior");
      nb.log_likelihood = reader.matrix("log_likelihood");
      artifact.model = std::move(nb);
    } else if (artifact.model_kind == "logreg" || artifact.model_kind == "svm") {
      LinearModel lin;
      lin.kind = artifact.model_kind == "svm" ? LinearKind::Svm : LinearKind::Logistic;
      lin.n_classes = params.at("n_classes").get<int>();
      lin.weights = reader.matrix("weights");
      lin.bias = reader.vector("bias");
      artifact.model = std::move(lin);
    } else if (artifact.model_kind == "forest") {
      ForestModel forest;
      forest.n_classes = params.at("n_classes").get<int>();
      const size_t n_trees = params.at("n_trees").get<size_t>();
      forest.trees.resize(n_trees);
      for (size_t t = 0; t < n_trees; ++t) {
        const Eigen::MatrixXd& m = reader.matrix("tree_" + std::to_string(t));
        std::vector<TreeNode>& nodes = forest.trees[t].nodes;
        nodes.resize(static_cast<size_t>(m.rows()));
        for (long i = 0; i < m.rows(); ++i) {
          nodes[static_cast<size_t>(i)].feature = to_int(m(i, 0));
          nodes[static_cast<size_t>(i)].threshold = m(i, 1);
          nodes[static_cast<size_t>(i)].left = to_int(m(i, 2));
          nodes[static_cast<size_t>(i)].right = to_int(m(i, 3));
          nodes[static_cast<size_t>(i)].leaf_class = to_int(m(i, 4));
        }
      }
      artifact.model = std::move(forest);
    } else if (artifact.model_kind == "lstm") {
      LstmModel lstm;
      lstm.config.vocab_size = params.at("vocab_size").get<int>();
      lstm.config.embed_dim = params.at("embed_dim").get<int>();
      lstm.config.hidden_dim = params.at("hidden_dim").get<int>();
      lstm.config.max_len = params.at("max_len").get<int>();
      lstm.config.dense_dim = params.at("dense_dim").get<int>();
      lstm.config.n_outputs = params.at("n_outputs").get<int>();
      lstm.config.lr = params.at("lr").get<double>();
      lstm.config.epochs = params.at("epochs").get<int>();
      lstm.config.batch_size = params.at("batch_size").get<int>();
      lstm.config.seed = params.at("seed").get<uint64_t>();
      lstm.config.embedding_init =
          parse_embedding_init(params.at("embedding_init").get<std::string>());
      lstm.config.embeddings_trainable = params.at("embeddings_trainable").get<bool>();
      lstm.config.bidirectional = params.at("bidirectional").get<bool>();
      lstm.config.grad_clip_norm = params.at("grad_clip_norm").get<double>();
      lstm.params = zero_params(lstm.config);
      visit_lstm_matrices(lstm.params, lstm.config.bidirectional,
                          [&reader](const std::string& name, auto& tensor) {
                            using T = std::decay_t<decltype(tensor)>;
                            if constexpr (std::is_same_v<T, Eigen::VectorXd>)
                              tensor = reader.vector(name);
                            else
                              tensor = reader.matrix(name);
                          });
      artifact.model = std::move(lstm);
    } else {
      throw CorruptArtifact("unknown model kind '" + artifact.model_kind + "'");
    }

    if (header.contains("embedding_tokens")) {
      const auto tokens = header.at("embedding_tokens").get<std::vector<std::string>>();
      const int dim = header.at("embedding_dim").get<int>();
      const Eigen::MatrixXd& vectors = reader.matrix("embedding_vectors");
      EmbeddingTable table(dim);
      for (size_t i = 0; i < tokens.size(); ++i)
        table.insert(tokens[i], vectors.row(static_cast<long>(i)).transpose());
      artifact.embeddings = std::move(table);
    }
    return artifact;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArtifact(std::string("bad model header: ") + e.what());
  }
}

int ModelArtifact::predict(const std::string& raw_text,
                           std::optional<double>* probability) const {
  if (probability) probability->reset();
  const EmojiMap emojis = emoji_map();
  const TokenSeq tokens = preprocess_pipeline(raw_text, emojis);

  if (model_kind == "lstm") {
    const auto& lstm = std::get<LstmModel>(model);
    const PaddedSequence seq = encode_sequence(tokens, vocab, features.max_len);
    double p = 0.0;
    const int label = lstm_predict(lstm, seq, &p);
    if (probability) *probability = p;
    return label;
  }

  SparseVector sparse;
  DenseVector dense;
  RowRef x;
  if (features.kind == "glove-avg") {
    dense = embed_average(tokens, embeddings);
    x.dense = &dense;
  } else if (features.kind == "count") {
    sparse = count_vectorize(tokens, vocab);
    x.sparse = &sparse;
  } else {
    sparse = tfidf_vectorize(tokens, vocab, features.tfidf_l2);
    x.sparse = &sparse;
  }

  if (model_kind == "nb") {
    const auto& nb = std::get<NBModel>(model);
    const int label = nb_predict(nb, x);
    if (probability) *probability = nb_posterior(nb, x)[label];
    return label;
  }
  if (model_kind == "forest") {
    const auto& forest = std::get<ForestModel>(model);
    int label = 0;
    const double share = forest_vote_share(forest, x, &label);
    if (probability) *probability = share;
    return label;
  }
  const auto& lin = std::get<LinearModel>(model);
  const int label = linear_predict(lin, x);
  if (lin.kind == LinearKind::Logistic && probability) {
    const Eigen::VectorXd scores = linear_scores(lin, x);
    const Eigen::VectorXd p = (1.0 / (1.0 + (-scores.array()).exp())).matrix();
    if (lin.binary())
      *probability = label == 1 ? p[0] : 1.0 - p[0];
    else
      *probability = p[label] / p.sum();  // one-vs-rest scores, renormalized
  }
  return label;
}

}  // namespace olidtk
