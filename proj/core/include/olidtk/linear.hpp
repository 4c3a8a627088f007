#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "olidtk/sampling.hpp"

namespace olidtk {

enum class LinearKind { Logistic, Svm };

// One score row for binary problems, one per class (one-vs-rest) otherwise.
struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  Eigen::MatrixXd weights;  // n_scores x dim
  Eigen::VectorXd bias;     // n_scores
  int n_classes = 2;

  bool binary() const { return weights.rows() == 1; }
};

struct LogRegParams {
  double lr = 0.1;
  int epochs = 50;
  double l2 = 1e-4;  // strength of (l2 / 2) * ||w||^2; the bias is not penalized
  int batch_size = 32;
};

struct SvmParams {
  double reg_lambda = 1e-4;
  int epochs = 20;
  // Kernel-style knobs accepted for config compatibility. The trainer is
  // linear-kernel only, so neither influences the fit; gamma < 0 means
  // "auto" and is recorded as 1 / n_features in the saved artifact.
  double gamma = -1.0;
  int degree = 3;
};

// Mini-batch gradient descent on mean binary cross-entropy plus the ridge
// term. Multiclass problems train one binary separator per class.
LinearModel logreg_train(const FeatureDataset& ds, const LogRegParams& params, uint64_t seed);

// Pegasos stochastic subgradient descent on the hinge objective
//   (lambda / 2) * ||w||^2 + mean_i max(0, 1 - y_i (w.x_i + b)).
LinearModel svm_train(const FeatureDataset& ds, const SvmParams& params, uint64_t seed);

Eigen::VectorXd linear_scores(const LinearModel& model, RowRef x);
int linear_predict(const LinearModel& model, RowRef x);
int linear_predict(const LinearModel& model, const SparseVector& x);
int linear_predict(const LinearModel& model, const DenseVector& x);

// Loss and gradient of one binary logistic subproblem over the given rows:
// mean BCE over the batch plus (l2 / 2) * ||w||^2. Exposed so the gradient
// can be checked against finite differences.
double logreg_loss_grad(const FeatureDataset& ds, const std::vector<size_t>& rows,
                        const std::vector<uint8_t>& y01, const Eigen::VectorXd& w, double b,
                        double l2, Eigen::VectorXd& grad_w, double& grad_b);

// Full-dataset Pegasos objective for one binary separator (labels +/-1).
double svm_objective(const FeatureDataset& ds, const std::vector<int8_t>& y_pm,
                     const Eigen::VectorXd& w, double b, double reg_lambda);

// One Pegasos update at step t >= 1 with learning rate 1 / (reg_lambda * t).
// Margin violations add the example term; otherwise only the weights decay.
void svm_step(Eigen::VectorXd& w, double& b, RowRef x, int y_pm, double reg_lambda,
              long long t);

}  // namespace olidtk
