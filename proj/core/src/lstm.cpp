#include "olidtk/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

void LstmConfig::validate() const {
  if (vocab_size < 0) throw ConfigError("lstm vocab_size must be >= 0");
  if (embed_dim < 1 || hidden_dim < 1 || dense_dim < 1)
    throw ConfigError("lstm layer sizes must be >= 1");
  if (max_len < 1) throw ConfigError("lstm max_len must be >= 1");
  if (n_outputs != 1 && n_outputs != 3)
    throw ConfigError("lstm supports 1 (sigmoid) or 3 (softmax) outputs");
  if (lr <= 0.0 || epochs < 1 || batch_size < 1) throw ConfigError("bad lstm training parameters");
}

namespace {

Eigen::Map<Eigen::VectorXd> flat(Eigen::MatrixXd& m) {
  return Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
}
Eigen::Map<Eigen::VectorXd> flat(Eigen::VectorXd& v) {
  return Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
}

void cell_views(const std::string& prefix, LstmCell& cell, std::vector<TensorView>& out) {
  out.emplace_back(prefix + ".w_in", flat(cell.w_in));
  out.emplace_back(prefix + ".w_forget", flat(cell.w_forget));
  out.emplace_back(prefix + ".w_out", flat(cell.w_out));
  out.emplace_back(prefix + ".w_cand", flat(cell.w_cand));
  out.emplace_back(prefix + ".u_in", flat(cell.u_in));
  out.emplace_back(prefix + ".u_forget", flat(cell.u_forget));
  out.emplace_back(prefix + ".u_out", flat(cell.u_out));
  out.emplace_back(prefix + ".u_cand", flat(cell.u_cand));
  out.emplace_back(prefix + ".b_in", flat(cell.b_in));
  out.emplace_back(prefix + ".b_forget", flat(cell.b_forget));
  out.emplace_back(prefix + ".b_out", flat(cell.b_out));
  out.emplace_back(prefix + ".b_cand", flat(cell.b_cand));
}

LstmCell zero_cell(int hidden, int embed) {
  LstmCell cell;
  cell.w_in = Eigen::MatrixXd::Zero(hidden, embed);
  cell.w_forget = Eigen::MatrixXd::Zero(hidden, embed);
  cell.w_out = Eigen::MatrixXd::Zero(hidden, embed);
  cell.w_cand = Eigen::MatrixXd::Zero(hidden, embed);
  cell.u_in = Eigen::MatrixXd::Zero(hidden, hidden);
  cell.u_forget = Eigen::MatrixXd::Zero(hidden, hidden);
  cell.u_out = Eigen::MatrixXd::Zero(hidden, hidden);
  cell.u_cand = Eigen::MatrixXd::Zero(hidden, hidden);
  cell.b_in = Eigen::VectorXd::Zero(hidden);
  cell.b_forget = Eigen::VectorXd::Zero(hidden);
  cell.b_out = Eigen::VectorXd::Zero(hidden);
  cell.b_cand = Eigen::VectorXd::Zero(hidden);
  return cell;
}

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// Walks one direction over the token prefix, filling per-step caches.
void run_direction(const LstmParams& params, const LstmCell& cell, const std::vector<int>& ids,
                   bool reverse, std::vector<LstmStep>& steps) {
  const int hidden = static_cast<int>(cell.b_in.size());
  const size_t len = ids.size();
  steps.resize(len);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(hidden);
  for (size_t s = 0; s < len; ++s) {
    const int id = reverse ? ids[len - 1 - s] : ids[s];
    LstmStep& step = steps[s];
    step.token_id = id;
    step.x = params.embedding.row(id).transpose();
    step.gi = sigmoid_vec(cell.w_in * step.x + cell.u_in * h + cell.b_in);
    step.gf = sigmoid_vec(cell.w_forget * step.x + cell.u_forget * h + cell.b_forget);
    step.go = sigmoid_vec(cell.w_out * step.x + cell.u_out * h + cell.b_out);
    step.gc = (cell.w_cand * step.x + cell.u_cand * h + cell.b_cand).array().tanh();
    step.c = step.gf.cwiseProduct(c) + step.gi.cwiseProduct(step.gc);
    step.tanh_c = step.c.array().tanh();
    step.h = step.go.cwiseProduct(step.tanh_c);
    c = step.c;
    h = step.h;
  }
}

// BPTT through one direction; dh_final enters at the last processed step.
void backprop_direction(const LstmCell& cell, const std::vector<LstmStep>& steps,
                        const Eigen::VectorXd& dh_final, LstmCell& grads,
                        Eigen::MatrixXd* embedding_grad) {
  const int hidden = static_cast<int>(cell.b_in.size());
  if (steps.empty()) return;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd dh = dh_final;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(hidden);
  for (size_t s = steps.size(); s-- > 0;) {
    const LstmStep& step = steps[s];
    const bool first = s == 0;
    const Eigen::VectorXd& h_prev = first ? zero : steps[s - 1].h;
    const Eigen::VectorXd& c_prev = first ? zero : steps[s - 1].c;

    dc += dh.cwiseProduct(step.go)
              .cwiseProduct((1.0 - step.tanh_c.array().square()).matrix());
    const Eigen::VectorXd dzo = dh.cwiseProduct(step.tanh_c)
                                    .cwiseProduct(step.go)
                                    .cwiseProduct((1.0 - step.go.array()).matrix());
    const Eigen::VectorXd dzi = dc.cwiseProduct(step.gc)
                                    .cwiseProduct(step.gi)
                                    .cwiseProduct((1.0 - step.gi.array()).matrix());
    const Eigen::VectorXd dzf = dc.cwiseProduct(c_prev)
                                    .cwiseProduct(step.gf)
                                    .cwiseProduct((1.0 - step.gf.array()).matrix());
    const Eigen::VectorXd dzg =
        dc.cwiseProduct(step.gi).cwiseProduct((1.0 - step.gc.array().square()).matrix());

    grads.w_in.noalias() += dzi * step.x.transpose();
    grads.w_forget.noalias() += dzf * step.x.transpose();
    grads.w_out.noalias() += dzo * step.x.transpose();
    grads.w_cand.noalias() += dzg * step.x.transpose();
    grads.u_in.noalias() += dzi * h_prev.transpose();
    grads.u_forget.noalias() += dzf * h_prev.transpose();
    grads.u_out.noalias() += dzo * h_prev.transpose();
    grads.u_cand.noalias() += dzg * h_prev.transpose();
    grads.b_in += dzi;
    grads.b_forget += dzf;
    grads.b_out += dzo;
    grads.b_cand += dzg;

    if (embedding_grad) {
      Eigen::VectorXd dx = cell.w_in.transpose() * dzi;
      dx.noalias() += cell.w_forget.transpose() * dzf;
      dx.noalias() += cell.w_out.transpose() * dzo;
      dx.noalias() += cell.w_cand.transpose() * dzg;
      embedding_grad->row(step.token_id) += dx.transpose();
    }

    dh = cell.u_in.transpose() * dzi;
    dh.noalias() += cell.u_forget.transpose() * dzf;
    dh.noalias() += cell.u_out.transpose() * dzo;
    dh.noalias() += cell.u_cand.transpose() * dzg;
    dc = dc.cwiseProduct(step.gf);
  }
}

}  // namespace

std::vector<TensorView> tensor_views(const LstmConfig& config, LstmParams& params) {
  std::vector<TensorView> views;
  views.emplace_back("embedding", flat(params.embedding));
  cell_views("fwd", params.fwd, views);
  if (config.bidirectional) cell_views("bwd", params.bwd, views);
  views.emplace_back("dense_w", flat(params.dense_w));
  views.emplace_back("dense_b", flat(params.dense_b));
  views.emplace_back("out_w", flat(params.out_w));
  views.emplace_back("out_b", flat(params.out_b));
  return views;
}

LstmParams zero_params(const LstmConfig& config) {
  LstmParams p;
  p.embedding = Eigen::MatrixXd::Zero(config.n_rows(), config.embed_dim);
  p.fwd = zero_cell(config.hidden_dim, config.embed_dim);
  if (config.bidirectional) p.bwd = zero_cell(config.hidden_dim, config.embed_dim);
  const int directions = config.bidirectional ? 2 : 1;
  p.dense_w = Eigen::MatrixXd::Zero(config.dense_dim, directions * config.hidden_dim);
  p.dense_b = Eigen::VectorXd::Zero(config.dense_dim);
  p.out_w = Eigen::MatrixXd::Zero(config.n_outputs, config.dense_dim);
  p.out_b = Eigen::VectorXd::Zero(config.n_outputs);
  return p;
}

Eigen::VectorXd lstm_forward(const LstmModel& model, const PaddedSequence& seq,
                             LstmForwardCache* cache) {
  const LstmConfig& cfg = model.config;
  const LstmParams& p = model.params;
  LstmForwardCache local;
  LstmForwardCache& cc = cache ? *cache : local;

  cc.ids.assign(seq.ids.begin(), seq.ids.begin() + static_cast<long>(seq.real_length()));
  run_direction(p, p.fwd, cc.ids, false, cc.fwd);
  if (cfg.bidirectional) run_direction(p, p.bwd, cc.ids, true, cc.bwd);

  const int directions = cfg.bidirectional ? 2 : 1;
  cc.concat_h = Eigen::VectorXd::Zero(directions * cfg.hidden_dim);
  if (!cc.fwd.empty()) cc.concat_h.head(cfg.hidden_dim) = cc.fwd.back().h;
  if (cfg.bidirectional && !cc.bwd.empty()) cc.concat_h.tail(cfg.hidden_dim) = cc.bwd.back().h;

  cc.dense_pre = p.dense_w * cc.concat_h + p.dense_b;
  cc.dense_act = cc.dense_pre.cwiseMax(0.0);
  Eigen::VectorXd out_pre = p.out_w * cc.dense_act + p.out_b;
  if (cfg.n_outputs == 1) {
    cc.out = sigmoid_vec(out_pre);
  } else {
    const double m = out_pre.maxCoeff();
    cc.out = (out_pre.array() - m).exp();
    cc.out /= cc.out.sum();
  }
  return cc.out;
}

Eigen::VectorXd encode_target(int label, int n_outputs) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n_outputs);
  if (n_outputs == 1) {
    t[0] = label == 1 ? 1.0 : 0.0;
  } else {
    t[label] = 1.0;
  }
  return t;
}

double lstm_loss(const Eigen::VectorXd& output, const Eigen::VectorXd& target) {
  static constexpr double kFloor = 1e-12;
  auto safe_log = [](double p) { return std::log(std::clamp(p, kFloor, 1.0 - kFloor)); };
  if (output.size() == 1)
    return -(target[0] * safe_log(output[0]) + (1.0 - target[0]) * safe_log(1.0 - output[0]));
  double loss = 0.0;
  for (int c = 0; c < output.size(); ++c)
    if (target[c] != 0.0) loss -= target[c] * safe_log(output[c]);
  return loss;
}

void lstm_backward(const LstmModel& model, const LstmForwardCache& cache,
                   const Eigen::VectorXd& target, LstmParams& grads) {
  const LstmConfig& cfg = model.config;
  const LstmParams& p = model.params;

  // Sigmoid+BCE and softmax+CCE both reduce to output minus target at the
  // pre-activation.
  const Eigen::VectorXd dout_pre = cache.out - target;
  grads.out_w.noalias() += dout_pre * cache.dense_act.transpose();
  grads.out_b += dout_pre;

  Eigen::VectorXd ddense_pre = p.out_w.transpose() * dout_pre;
  for (int i = 0; i < ddense_pre.size(); ++i)
    if (cache.dense_pre[i] <= 0.0) ddense_pre[i] = 0.0;
  grads.dense_w.noalias() += ddense_pre * cache.concat_h.transpose();
  grads.dense_b += ddense_pre;

  const Eigen::VectorXd dconcat = p.dense_w.transpose() * ddense_pre;
  Eigen::MatrixXd* embed_grad = cfg.embeddings_trainable ? &grads.embedding : nullptr;
  backprop_direction(p.fwd, cache.fwd, dconcat.head(cfg.hidden_dim), grads.fwd, embed_grad);
  if (cfg.bidirectional)
    backprop_direction(p.bwd, cache.bwd, dconcat.tail(cfg.hidden_dim), grads.bwd, embed_grad);
}

void adam_update(Eigen::Ref<Eigen::VectorXd> param, const Eigen::Ref<const Eigen::VectorXd>& grad,
                 Eigen::Ref<Eigen::VectorXd> m, Eigen::Ref<Eigen::VectorXd> v, long long step,
                 double lr, double beta1, double beta2, double epsilon) {
  m = beta1 * m + (1.0 - beta1) * grad;
  v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + epsilon);
}

AdamState adam_init(const LstmConfig& config) {
  AdamState state;
  state.m = zero_params(config);
  state.v = zero_params(config);
  return state;
}

void adam_step(const LstmConfig& config, LstmParams& params, LstmParams& grads, AdamState& state,
               double lr) {
  state.step++;
  auto pv = tensor_views(config, params);
  auto gv = tensor_views(config, grads);
  auto mv = tensor_views(config, state.m);
  auto vv = tensor_views(config, state.v);
  for (size_t i = 0; i < pv.size(); ++i)
    adam_update(pv[i].second, gv[i].second, mv[i].second, vv[i].second, state.step, lr,
                state.beta1, state.beta2, state.epsilon);
}

LstmModel lstm_init(const LstmConfig& config, const EmbeddingTable* glove,
                    const Vocabulary* vocab) {
  config.validate();
  if (config.embedding_init == EmbeddingInit::GloveTable && (!glove || !vocab))
    throw ConfigError("glove-table embedding init needs an embedding table and a vocabulary");
  if (config.embedding_init == EmbeddingInit::GloveTable && glove->dim() != config.embed_dim)
    throw ConfigError("embedding table dimension does not match embed_dim");

  LstmModel model;
  model.config = config;
  model.params = zero_params(config);
  LstmParams& p = model.params;
  Rng rng(config.seed);

  // Pad row 0 stays zero; every other row (oov included) starts random.
  for (int r = 1; r < config.n_rows(); ++r)
    for (int c = 0; c < config.embed_dim; ++c) p.embedding(r, c) = rng.uniform(-0.05, 0.05);

  auto glorot = [&rng](Eigen::MatrixXd& m) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
  };
  auto init_cell = [&](LstmCell& cell) {
    glorot(cell.w_in);
    glorot(cell.w_forget);
    glorot(cell.w_out);
    glorot(cell.w_cand);
    glorot(cell.u_in);
    glorot(cell.u_forget);
    glorot(cell.u_out);
    glorot(cell.u_cand);
    cell.b_forget.setOnes();
  };
  init_cell(p.fwd);
  if (config.bidirectional) init_cell(p.bwd);
  glorot(p.dense_w);
  glorot(p.out_w);

  if (config.embedding_init == EmbeddingInit::GloveTable) {
    for (size_t i = 0; i < vocab->tokens.size(); ++i) {
      const Eigen::VectorXd* vec = glove->find(vocab->tokens[i]);
      if (vec) p.embedding.row(static_cast<long>(i) + 2) = vec->transpose();
    }
  }
  return model;
}

LstmModel lstm_train(const std::vector<PaddedSequence>& sequences, const std::vector<int>& labels,
                     const LstmConfig& config, const EmbeddingTable* glove,
                     const Vocabulary* vocab, LstmTrainLog* log) {
  if (sequences.size() != labels.size())
    throw LengthMismatch("sequence and label counts differ");
  if (sequences.empty()) throw EmptyCorpus("lstm needs at least one training sequence");
  for (int y : labels)
    if (y < 0 || y >= config.n_classes()) throw UnknownClass("label out of range for lstm head");

  LstmModel model = lstm_init(config, glove, vocab);
  AdamState adam = adam_init(config);
  LstmParams grads = zero_params(config);
  auto grad_views = tensor_views(config, grads);

  Rng shuffle_rng(mix_seed(config.seed, 1));
  const size_t n = sequences.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  LstmForwardCache cache;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (size_t start = 0; start < n; start += static_cast<size_t>(config.batch_size)) {
      const size_t stop = std::min(n, start + static_cast<size_t>(config.batch_size));
      for (auto& [name, view] : grad_views) view.setZero();

      for (size_t k = start; k < stop; ++k) {
        const size_t i = order[k];
        lstm_forward(model, sequences[i], &cache);
        const Eigen::VectorXd target = encode_target(labels[i], config.n_outputs);
        loss_sum += lstm_loss(cache.out, target);
        lstm_backward(model, cache, target, grads);
      }
      if (!std::isfinite(loss_sum)) throw NonFiniteLoss("lstm training loss diverged");

      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      double norm_sq = 0.0;
      for (auto& [name, view] : grad_views) {
        view *= inv_batch;
        norm_sq += view.squaredNorm();
      }
      if (config.grad_clip_norm > 0.0) {
        const double norm = std::sqrt(norm_sq);
        if (norm > config.grad_clip_norm) {
          const double scale = config.grad_clip_norm / norm;
          for (auto& [name, view] : grad_views) view *= scale;
        }
      }
      adam_step(config, model.params, grads, adam, config.lr);
    }
    if (log) log->epoch_mean_loss.push_back(loss_sum / static_cast<double>(n));
  }
  return model;
}

int lstm_predict(const LstmModel& model, const PaddedSequence& seq, double* probability) {
  const Eigen::VectorXd out = lstm_forward(model, seq);
  if (model.config.n_outputs == 1) {
    const double p = out[0];
    const int label = p > 0.5 ? 1 : 0;
    if (probability) *probability = label == 1 ? p : 1.0 - p;
    return label;
  }
  int best = 0;
  for (int c = 1; c < out.size(); ++c)
    if (out[c] > out[best]) best = c;
  if (probability) *probability = out[best];
  return best;
}

}  // namespace olidtk
