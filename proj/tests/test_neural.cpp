#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "olidtk/errors.hpp"
#include "olidtk/lstm.hpp"
#include "olidtk/rng.hpp"

using namespace olidtk;

namespace {

LstmConfig tiny_config(int n_outputs, bool bidirectional) {
  LstmConfig cfg;
  cfg.vocab_size = 4;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 3;
  cfg.max_len = 5;
  cfg.dense_dim = 3;
  cfg.n_outputs = n_outputs;
  cfg.bidirectional = bidirectional;
  cfg.seed = 12345;
  return cfg;
}

PaddedSequence seq_of(std::vector<int> ids, int max_len) {
  PaddedSequence s;
  s.ids = std::move(ids);
  s.ids.resize(static_cast<size_t>(max_len), kPadId);
  return s;
}

double scalar_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Plain-loop forward pass over one direction; no Eigen expressions, so any
// convention mismatch in the production code shows up as a numeric diff.
std::vector<double> reference_direction(const LstmModel& model, const LstmCell& cell,
                                        const std::vector<int>& ids, bool reverse) {
  const int H = model.config.hidden_dim;
  const int E = model.config.embed_dim;
  std::vector<double> h(H, 0.0), c(H, 0.0);
  for (size_t s = 0; s < ids.size(); ++s) {
    int id = reverse ? ids[ids.size() - 1 - s] : ids[s];
    std::vector<double> x(E);
    for (int e = 0; e < E; ++e) x[e] = model.params.embedding(id, e);

    std::vector<double> hn(H), cn(H);
    for (int i = 0; i < H; ++i) {
      double zi = cell.b_in(i), zf = cell.b_forget(i), zo = cell.b_out(i), zg = cell.b_cand(i);
      for (int e = 0; e < E; ++e) {
        zi += cell.w_in(i, e) * x[e];
        zf += cell.w_forget(i, e) * x[e];
        zo += cell.w_out(i, e) * x[e];
        zg += cell.w_cand(i, e) * x[e];
      }
      for (int j = 0; j < H; ++j) {
        zi += cell.u_in(i, j) * h[j];
        zf += cell.u_forget(i, j) * h[j];
        zo += cell.u_out(i, j) * h[j];
        zg += cell.u_cand(i, j) * h[j];
      }
      double gi = scalar_sigmoid(zi), gf = scalar_sigmoid(zf), go = scalar_sigmoid(zo);
      double gc = std::tanh(zg);
      cn[i] = gf * c[i] + gi * gc;
      hn[i] = go * std::tanh(cn[i]);
    }
    h = hn;
    c = cn;
  }
  return h;
}

std::vector<double> reference_forward(const LstmModel& model, const PaddedSequence& seq) {
  const LstmConfig& cfg = model.config;
  std::vector<int> ids;
  for (int id : seq.ids) {
    if (id == kPadId) break;
    ids.push_back(id);
  }
  std::vector<double> concat = reference_direction(model, model.params.fwd, ids, false);
  if (cfg.bidirectional) {
    std::vector<double> back = reference_direction(model, model.params.bwd, ids, true);
    concat.insert(concat.end(), back.begin(), back.end());
  }

  std::vector<double> dense(cfg.dense_dim);
  for (int i = 0; i < cfg.dense_dim; ++i) {
    double z = model.params.dense_b(i);
    for (size_t j = 0; j < concat.size(); ++j) z += model.params.dense_w(i, static_cast<int>(j)) * concat[j];
    dense[i] = std::max(0.0, z);
  }

  std::vector<double> out(cfg.n_outputs);
  for (int o = 0; o < cfg.n_outputs; ++o) {
    double z = model.params.out_b(o);
    for (int i = 0; i < cfg.dense_dim; ++i) z += model.params.out_w(o, i) * dense[i];
    out[o] = z;
  }
  if (cfg.n_outputs == 1) {
    out[0] = scalar_sigmoid(out[0]);
  } else {
    double m = *std::max_element(out.begin(), out.end());
    double sum = 0.0;
    for (double& v : out) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : out) v /= sum;
  }
  return out;
}

// Synthetic task: label 1 exactly when the marker token appears.
struct ToyData {
  std::vector<PaddedSequence> sequences;
  std::vector<int> labels;
};

ToyData token_presence_toy(int n, int vocab_size, int max_len, uint64_t seed) {
  const int marker = 2;  // first vocabulary token's sequence id
  Rng rng(seed);
  ToyData d;
  for (int i = 0; i < n; ++i) {
    int label = i % 2;
    std::vector<int> ids(static_cast<size_t>(max_len));
    for (int t = 0; t < max_len; ++t) {
      int id = marker + 1 + static_cast<int>(rng.below(static_cast<uint64_t>(vocab_size - 1)));
      ids[static_cast<size_t>(t)] = id;
    }
    if (label == 1) ids[rng.below(static_cast<uint64_t>(max_len))] = marker;
    d.sequences.push_back(seq_of(std::move(ids), max_len));
    d.labels.push_back(label);
  }
  return d;
}

double mean_loss(const LstmModel& model, const ToyData& d) {
  double total = 0.0;
  for (size_t i = 0; i < d.sequences.size(); ++i) {
    Eigen::VectorXd out = lstm_forward(model, d.sequences[i]);
    total += lstm_loss(out, encode_target(d.labels[i], model.config.n_outputs));
  }
  return total / static_cast<double>(d.sequences.size());
}

double train_accuracy(const LstmModel& model, const ToyData& d) {
  int hits = 0;
  for (size_t i = 0; i < d.sequences.size(); ++i)
    hits += lstm_predict(model, d.sequences[i]) == d.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(d.sequences.size());
}

}  // namespace

TEST_CASE("zero parameters output one half") {
  LstmConfig cfg = tiny_config(1, true);
  LstmModel model{cfg, zero_params(cfg)};
  Eigen::VectorXd out = lstm_forward(model, seq_of({2, 3, 4}, cfg.max_len));
  REQUIRE(out.size() == 1);
  CHECK(out(0) == doctest::Approx(0.5));
}

TEST_CASE("all-pad input is decided by the dense bias path") {
  LstmConfig cfg = tiny_config(1, true);
  LstmModel model = lstm_init(cfg);
  LstmForwardCache cache;
  Eigen::VectorXd out = lstm_forward(model, seq_of({}, cfg.max_len), &cache);

  CHECK(cache.ids.empty());
  CHECK(cache.concat_h.norm() == 0.0);  // zero hidden state
  Eigen::VectorXd dense = (model.params.dense_b).cwiseMax(0.0);
  double z = (model.params.out_w * dense + model.params.out_b)(0);
  CHECK(out(0) == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-12));
}

TEST_CASE("forward pass matches a scalar-loop reference") {
  for (bool bidir : {true, false}) {
    for (int n_out : {1, 3}) {
      LstmConfig cfg = tiny_config(n_out, bidir);
      cfg.seed = 777 + n_out;
      LstmModel model = lstm_init(cfg);
      Rng rng(55);
      for (int trial = 0; trial < 10; ++trial) {
        int len = static_cast<int>(rng.below(static_cast<uint64_t>(cfg.max_len + 1)));
        std::vector<int> ids;
        for (int t = 0; t < len; ++t)
          ids.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(cfg.n_rows() - 1))) + 1);
        Eigen::VectorXd got = lstm_forward(model, seq_of(ids, cfg.max_len));
        std::vector<double> want = reference_forward(model, seq_of(ids, cfg.max_len));
        REQUIRE(got.size() == static_cast<int>(want.size()));
        for (int i = 0; i < got.size(); ++i) CHECK(std::abs(got(i) - want[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("outputs are proper probabilities and gates stay in range") {
  LstmConfig cfg3 = tiny_config(3, true);
  LstmModel model3 = lstm_init(cfg3);
  LstmConfig cfg1 = tiny_config(1, false);
  cfg1.seed = 99;
  LstmModel model1 = lstm_init(cfg1);

  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<int> ids;
    int len = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(cfg3.max_len)));
    for (int t = 0; t < len; ++t)
      ids.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(cfg3.n_rows()))));

    LstmForwardCache cache;
    Eigen::VectorXd p3 = lstm_forward(model3, seq_of(ids, cfg3.max_len), &cache);
    CHECK(std::abs(p3.sum() - 1.0) <= 1e-12);
    CHECK(p3.minCoeff() > 0.0);
    CHECK(p3.maxCoeff() < 1.0);

    Eigen::VectorXd p1 = lstm_forward(model1, seq_of(ids, cfg3.max_len));
    CHECK(p1(0) > 0.0);
    CHECK(p1(0) < 1.0);

    for (const auto& steps : {cache.fwd, cache.bwd}) {
      for (const LstmStep& s : steps) {
        for (const Eigen::VectorXd* g : {&s.gi, &s.gf, &s.go}) {
          CHECK(g->minCoeff() > 0.0);
          CHECK(g->maxCoeff() < 1.0);
        }
        CHECK(s.gc.minCoeff() > -1.0);
        CHECK(s.gc.maxCoeff() < 1.0);
      }
    }
  }
}

TEST_CASE("target encoding") {
  CHECK(encode_target(0, 1)(0) == 0.0);
  CHECK(encode_target(1, 1)(0) == 1.0);
  Eigen::VectorXd t = encode_target(2, 3);
  CHECK(t(0) == 0.0);
  CHECK(t(1) == 0.0);
  CHECK(t(2) == 1.0);
}

TEST_CASE("every tensor's gradient matches finite differences") {
  const double step = 1e-5;
  Rng rng(808);
  for (bool bidir : {true, false}) {
    for (int n_out : {1, 3}) {
      LstmConfig cfg = tiny_config(n_out, bidir);
      cfg.seed = 4242 + n_out + (bidir ? 10 : 0);
      LstmModel model = lstm_init(cfg);

      std::vector<int> ids = {2, 5, 1, 3};  // includes an OOV token
      PaddedSequence seq = seq_of(ids, cfg.max_len);
      int label = n_out == 1 ? 1 : 2;
      Eigen::VectorXd target = encode_target(label, n_out);

      LstmForwardCache cache;
      lstm_forward(model, seq, &cache);
      LstmParams grads = zero_params(cfg);
      lstm_backward(model, cache, target, grads);

      auto grad_views = tensor_views(cfg, grads);
      auto param_views = tensor_views(cfg, model.params);
      REQUIRE(grad_views.size() == param_views.size());

      for (size_t v = 0; v < param_views.size(); ++v) {
        auto& [name, pview] = param_views[v];
        auto& gview = grad_views[v].second;
        REQUIRE(pview.size() == gview.size());
        double max_rel = 0.0;
        for (int i = 0; i < pview.size(); ++i) {
          double keep = pview(i);
          pview(i) = keep + step;
          double up = lstm_loss(lstm_forward(model, seq), target);
          pview(i) = keep - step;
          double down = lstm_loss(lstm_forward(model, seq), target);
          pview(i) = keep;
          double fd = (up - down) / (2 * step);
          double rel =
              std::abs(gview(i) - fd) / std::max({std::abs(gview(i)), std::abs(fd), 1e-6});
          max_rel = std::max(max_rel, rel);
        }
        INFO("tensor ", name, " bidir=", bidir, " n_out=", n_out);
        CHECK(max_rel <= 1e-4);
      }
    }
  }
  (void)rng;
}

TEST_CASE("a perfectly matched prediction backpropagates nothing") {
  LstmConfig cfg = tiny_config(3, true);
  LstmModel model = lstm_init(cfg);
  PaddedSequence seq = seq_of({2, 3}, cfg.max_len);

  LstmForwardCache cache;
  Eigen::VectorXd out = lstm_forward(model, seq, &cache);
  LstmParams grads = zero_params(cfg);
  lstm_backward(model, cache, out, grads);  // target equals the output

  for (auto& [name, view] : tensor_views(cfg, grads)) {
    INFO("tensor ", name);
    CHECK(view.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
  Eigen::VectorXd param(3), grad = Eigen::VectorXd::Zero(3), m = Eigen::VectorXd::Zero(3),
                  v = Eigen::VectorXd::Zero(3);
  param << 1.0, -2.0, 0.5;
  Eigen::VectorXd before = param;
  for (long long t = 1; t <= 5; ++t)
    adam_update(param, grad, m, v, t, 1e-3, 0.9, 0.999, 1e-8);
  CHECK((param - before).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("adam under a constant gradient steps by the learning rate") {
  const double lr = 1e-3;
  Eigen::VectorXd param(2), grad(2), m = Eigen::VectorXd::Zero(2), v = Eigen::VectorXd::Zero(2);
  param << 0.0, 0.0;
  grad << 2.5, -0.3;
  double prev0 = param(0), prev1 = param(1);
  for (long long t = 1; t <= 50; ++t) {
    adam_update(param, grad, m, v, t, lr, 0.9, 0.999, 1e-8);
    // Bias correction makes m_hat = g and v_hat = g^2 exactly, so each step
    // moves by lr * g / (|g| + eps) ~= lr * sign(g).
    CHECK(param(0) - prev0 == doctest::Approx(-lr).epsilon(1e-6));
    CHECK(param(1) - prev1 == doctest::Approx(+lr).epsilon(1e-6));
    prev0 = param(0);
    prev1 = param(1);
  }
  CHECK(param(0) == doctest::Approx(-50 * lr).epsilon(1e-6));
}

TEST_CASE("tensor views cover disjoint memory in a fixed order") {
  LstmConfig cfg = tiny_config(3, true);
  LstmParams params = zero_params(cfg);
  auto views = tensor_views(cfg, params);

  std::vector<std::string> names;
  long long total = 0;
  for (auto& [name, view] : views) {
    names.push_back(name);
    total += view.size();
  }
  std::vector<std::string> expected = {
      "embedding",  "fwd.w_in",  "fwd.w_forget", "fwd.w_out",  "fwd.w_cand", "fwd.u_in",
      "fwd.u_forget", "fwd.u_out", "fwd.u_cand", "fwd.b_in",   "fwd.b_forget", "fwd.b_out",
      "fwd.b_cand", "bwd.w_in",  "bwd.w_forget", "bwd.w_out",  "bwd.w_cand", "bwd.u_in",
      "bwd.u_forget", "bwd.u_out", "bwd.u_cand", "bwd.b_in",   "bwd.b_forget", "bwd.b_out",
      "bwd.b_cand", "dense_w",   "dense_b",      "out_w",      "out_b"};
  CHECK(names == expected);

  long long expect_total = 0;
  expect_total += static_cast<long long>(cfg.n_rows()) * cfg.embed_dim;
  expect_total += 2 * (4 * cfg.hidden_dim * cfg.embed_dim + 4 * cfg.hidden_dim * cfg.hidden_dim +
                       4 * cfg.hidden_dim);
  expect_total += cfg.dense_dim * 2 * cfg.hidden_dim + cfg.dense_dim;
  expect_total += cfg.n_outputs * cfg.dense_dim + cfg.n_outputs;
  CHECK(total == expect_total);

  // Writing through one view must not leak into any other tensor.
  for (size_t v = 0; v < views.size(); ++v) {
    for (int i = 0; i < views[v].second.size(); ++i)
      views[v].second(i) = static_cast<double>(v + 1);
  }
  for (size_t v = 0; v < views.size(); ++v)
    for (int i = 0; i < views[v].second.size(); ++i)
      CHECK(views[v].second(i) == static_cast<double>(v + 1));
  CHECK(params.embedding(0, 0) == 1.0);
  CHECK(params.out_b(0) == 29.0);
}

TEST_CASE("initialization is seeded and honors pretrained vectors") {
  LstmConfig cfg = tiny_config(1, true);
  Vocabulary vocab;
  for (const char* t : {"alpha", "beta", "gamma", "delta"}) {
    vocab.index[t] = vocab.size();
    vocab.tokens.push_back(t);
    vocab.df.push_back(1);
  }
  vocab.n_docs = 1;

  EmbeddingTable glove(cfg.embed_dim);
  glove.insert("alpha", (DenseVector(3) << 9.0, 8.0, 7.0).finished());
  glove.insert("gamma", (DenseVector(3) << -1.0, -2.0, -3.0).finished());

  LstmModel plain = lstm_init(cfg);
  LstmConfig gcfg = cfg;
  gcfg.embedding_init = EmbeddingInit::GloveTable;
  LstmModel pre = lstm_init(gcfg, &glove, &vocab);

  // Pretrained rows land at vocabulary id + 2.
  CHECK((pre.params.embedding.row(2) - (Eigen::RowVector3d() << 9.0, 8.0, 7.0).finished())
            .norm() == 0.0);
  CHECK((pre.params.embedding.row(4) - (Eigen::RowVector3d() << -1.0, -2.0, -3.0).finished())
            .norm() == 0.0);
  // The pad row stays zero; untouched rows keep the random draw, which is
  // identical to the glove-free run because overwrites happen after all
  // random draws.
  CHECK(pre.params.embedding.row(0).norm() == 0.0);
  CHECK((pre.params.embedding.row(3) - plain.params.embedding.row(3)).norm() == 0.0);
  CHECK((pre.params.embedding.row(1) - plain.params.embedding.row(1)).norm() == 0.0);
  CHECK((pre.params.embedding.row(2) - plain.params.embedding.row(2)).norm() > 0.0);

  // Random embedding rows live in (-0.05, 0.05); forget biases start at 1.
  CHECK(plain.params.embedding.cwiseAbs().maxCoeff() < 0.05);
  CHECK((plain.params.fwd.b_forget - Eigen::VectorXd::Ones(cfg.hidden_dim)).norm() == 0.0);
  CHECK(plain.params.fwd.b_in.norm() == 0.0);

  // Same seed, same parameters.
  LstmModel again = lstm_init(cfg);
  for (auto& [name, view] : tensor_views(cfg, plain.params)) {
    auto views2 = tensor_views(cfg, again.params);
    for (auto& [name2, view2] : views2) {
      if (name2 != name) continue;
      CHECK((view - view2).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }

  CHECK_THROWS_AS(lstm_init(gcfg, nullptr, nullptr), ConfigError);
}

TEST_CASE("frozen embeddings never move") {
  LstmConfig cfg = tiny_config(1, true);
  cfg.embeddings_trainable = false;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  ToyData toy = token_presence_toy(24, cfg.vocab_size, cfg.max_len, 5);

  LstmModel before = lstm_init(cfg);
  LstmModel after = lstm_train(toy.sequences, toy.labels, cfg);
  CHECK((before.params.embedding - after.params.embedding).lpNorm<Eigen::Infinity>() == 0.0);
  // Everything else trained.
  CHECK((before.params.dense_w - after.params.dense_w).lpNorm<Eigen::Infinity>() > 0.0);

  // The gradient itself is zero for the embedding when frozen.
  PaddedSequence seq = toy.sequences[0];
  LstmForwardCache cache;
  lstm_forward(before, seq, &cache);
  LstmParams grads = zero_params(cfg);
  lstm_backward(before, cache, encode_target(toy.labels[0], 1), grads);
  CHECK(grads.embedding.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(grads.fwd.w_in.lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("token-presence toy task trains to high accuracy") {
  LstmConfig cfg;
  cfg.vocab_size = 10;
  cfg.embed_dim = 12;
  cfg.hidden_dim = 12;
  cfg.dense_dim = 12;
  cfg.max_len = 8;
  cfg.n_outputs = 1;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.lr = 0.01;
  cfg.seed = 71;
  ToyData toy = token_presence_toy(100, cfg.vocab_size, cfg.max_len, 99);

  // Untrained, balanced labels: mean BCE sits at ln 2.
  LstmModel fresh = lstm_init(cfg);
  CHECK(std::abs(mean_loss(fresh, toy) - std::log(2.0)) <= 0.05);

  LstmTrainLog log;
  LstmModel trained = lstm_train(toy.sequences, toy.labels, cfg, nullptr, nullptr, &log);
  CHECK(train_accuracy(trained, toy) >= 0.95);
  REQUIRE(log.epoch_mean_loss.size() == 20);
  CHECK(log.epoch_mean_loss.back() < log.epoch_mean_loss.front());
}

TEST_CASE("training lowers the loss for every seed") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    LstmConfig cfg = tiny_config(1, true);
    cfg.hidden_dim = 6;
    cfg.embed_dim = 6;
    cfg.dense_dim = 6;
    cfg.vocab_size = 8;
    cfg.max_len = 6;
    cfg.epochs = 5;
    cfg.lr = 0.02;
    cfg.batch_size = 8;
    cfg.seed = seed;
    ToyData toy = token_presence_toy(40, cfg.vocab_size, cfg.max_len, seed * 31 + 1);

    double before = mean_loss(lstm_init(cfg), toy);
    LstmModel trained = lstm_train(toy.sequences, toy.labels, cfg);
    double after = mean_loss(trained, toy);
    CHECK(after < before);
  }
}

TEST_CASE("training is deterministic in the seed") {
  LstmConfig cfg = tiny_config(1, true);
  cfg.epochs = 2;
  cfg.batch_size = 8;
  ToyData toy = token_presence_toy(20, cfg.vocab_size, cfg.max_len, 3);

  LstmModel a = lstm_train(toy.sequences, toy.labels, cfg);
  LstmModel b = lstm_train(toy.sequences, toy.labels, cfg);
  auto va = tensor_views(cfg, a.params);
  auto vb = tensor_views(cfg, b.params);
  REQUIRE(va.size() == vb.size());
  for (size_t i = 0; i < va.size(); ++i)
    CHECK((va[i].second - vb[i].second).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("configuration validation") {
  LstmConfig cfg = tiny_config(1, true);
  CHECK_NOTHROW(cfg.validate());
  cfg.n_outputs = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config(1, true);
  cfg.max_len = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config(1, true);
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(tiny_config(1, true).n_classes() == 2);
  CHECK(tiny_config(3, true).n_classes() == 3);
}

TEST_CASE("binary predictions threshold at one half") {
  LstmConfig cfg = tiny_config(1, true);
  LstmModel model = lstm_init(cfg);
  PaddedSequence seq = seq_of({2, 3, 4}, cfg.max_len);
  double prob = 0.0;
  int pred = lstm_predict(model, seq, &prob);
  Eigen::VectorXd out = lstm_forward(model, seq);
  CHECK(pred == (out(0) > 0.5 ? 1 : 0));
  CHECK(prob == doctest::Approx(pred == 1 ? out(0) : 1.0 - out(0)));

  LstmConfig cfg3 = tiny_config(3, true);
  LstmModel model3 = lstm_init(cfg3);
  double prob3 = 0.0;
  int pred3 = lstm_predict(model3, seq, &prob3);
  Eigen::VectorXd out3 = lstm_forward(model3, seq);
  int arg = 0;
  for (int i = 1; i < 3; ++i) arg = out3(i) > out3(arg) ? i : arg;
  CHECK(pred3 == arg);
  CHECK(prob3 == doctest::Approx(out3(arg)));
}
