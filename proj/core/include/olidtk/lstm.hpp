#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "olidtk/features.hpp"

namespace olidtk {

enum class EmbeddingInit { Random, GloveTable };

struct LstmConfig {
  int vocab_size = 0;  // tokens in the vocabulary; sequence ids add 2 (pad, oov)
  int embed_dim = 200;
  int hidden_dim = 64;
  int max_len = 60;
  int dense_dim = 32;
  int n_outputs = 1;  // 1: sigmoid + BCE, 3: softmax + cross-entropy
  double lr = 1e-3;
  int epochs = 10;
  int batch_size = 32;
  uint64_t seed = 42;
  EmbeddingInit embedding_init = EmbeddingInit::Random;
  bool embeddings_trainable = true;
  bool bidirectional = true;
  double grad_clip_norm = 5.0;  // global norm cap per batch; <= 0 disables

  int n_rows() const { return vocab_size + 2; }
  int n_classes() const { return n_outputs == 1 ? 2 : n_outputs; }
  void validate() const;
};

// Gate parameters for one direction.
struct LstmCell {
  Eigen::MatrixXd w_in, w_forget, w_out, w_cand;  // hidden_dim x embed_dim
  Eigen::MatrixXd u_in, u_forget, u_out, u_cand;  // hidden_dim x hidden_dim
  Eigen::VectorXd b_in, b_forget, b_out, b_cand;  // hidden_dim
};

// Every trainable tensor; doubles throughout. The same struct holds model
// weights, gradients and Adam moment estimates.
struct LstmParams {
  Eigen::MatrixXd embedding;  // n_rows x embed_dim, row 0 is the pad vector
  LstmCell fwd, bwd;          // bwd stays empty when unidirectional
  Eigen::MatrixXd dense_w;    // dense_dim x (directions * hidden_dim)
  Eigen::VectorXd dense_b;
  Eigen::MatrixXd out_w;  // n_outputs x dense_dim
  Eigen::VectorXd out_b;
};

struct LstmModel {
  LstmConfig config;
  LstmParams params;
};

// Named flat views over the tensors, in a fixed order shared by the
// optimizer, the serializer and the gradient checks.
using TensorView = std::pair<std::string, Eigen::Map<Eigen::VectorXd>>;
std::vector<TensorView> tensor_views(const LstmConfig& config, LstmParams& params);

LstmParams zero_params(const LstmConfig& config);

// One time step of activations, kept for backpropagation.
struct LstmStep {
  int token_id = 0;
  Eigen::VectorXd x;                  // embedding input
  Eigen::VectorXd gi, gf, go, gc;     // post-activation gates
  Eigen::VectorXd c, h, tanh_c;
};

struct LstmForwardCache {
  std::vector<int> ids;               // real-token prefix, pads excluded
  std::vector<LstmStep> fwd, bwd;     // bwd walks the prefix in reverse
  Eigen::VectorXd concat_h, dense_pre, dense_act, out;
};

// Runs the network over the unpadded prefix of the sequence and returns the
// output activation (sigmoid scalar or softmax vector). Pads never touch the
// recurrence; an all-pad sequence yields zero hidden states.
Eigen::VectorXd lstm_forward(const LstmModel& model, const PaddedSequence& seq,
                             LstmForwardCache* cache = nullptr);

// One-hot target (size 1 holding 0/1 for the binary head).
Eigen::VectorXd encode_target(int label, int n_outputs);

// Cross-entropy of the cached output against the target (probabilities are
// clamped away from 0 for the log only).
double lstm_loss(const Eigen::VectorXd& output, const Eigen::VectorXd& target);

// Backpropagation through time over one cached example; accumulates into
// `grads` (embedding rows stay untouched when embeddings are frozen).
void lstm_backward(const LstmModel& model, const LstmForwardCache& cache,
                   const Eigen::VectorXd& target, LstmParams& grads);

// Adam with bias correction; moments live in the same tensor layout.
struct AdamState {
  LstmParams m, v;
  long long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState adam_init(const LstmConfig& config);

// Single-tensor Adam update for bias-corrected step `step` (1-based).
void adam_update(Eigen::Ref<Eigen::VectorXd> param, const Eigen::Ref<const Eigen::VectorXd>& grad,
                 Eigen::Ref<Eigen::VectorXd> m, Eigen::Ref<Eigen::VectorXd> v, long long step,
                 double lr, double beta1, double beta2, double epsilon);

void adam_step(const LstmConfig& config, LstmParams& params, LstmParams& grads, AdamState& state,
               double lr);

// Seeded initialization: Glorot-uniform weight matrices, zero biases except
// the forget gate (1.0, keeps early memory open), embedding rows uniform in
// (-0.05, 0.05). With GloveTable init, vocabulary tokens found in the table
// get their pretrained vector; the pad row stays zero.
LstmModel lstm_init(const LstmConfig& config, const EmbeddingTable* glove = nullptr,
                    const Vocabulary* vocab = nullptr);

struct LstmTrainLog {
  std::vector<double> epoch_mean_loss;
};

// Mini-batch training with Adam; gradients are averaged over the batch and
// the global norm is clipped. Sequential and deterministic for a fixed seed.
LstmModel lstm_train(const std::vector<PaddedSequence>& sequences, const std::vector<int>& labels,
                     const LstmConfig& config, const EmbeddingTable* glove = nullptr,
                     const Vocabulary* vocab = nullptr, LstmTrainLog* log = nullptr);

// Predicted class (sigmoid output > 0.5, or softmax argmax with ties to the
// lowest id); optionally the probability of that class.
int lstm_predict(const LstmModel& model, const PaddedSequence& seq,
                 double* probability = nullptr);

}  // namespace olidtk
