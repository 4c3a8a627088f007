#include "olidtk/linear.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// BCE directly from the logit; never evaluates log(0).
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

int check_classes(const FeatureDataset& ds) {
  if (ds.size() == 0) throw EmptyCorpus("linear model needs at least one row");
  if (ds.n_classes < 2) throw ConfigError("linear model needs at least two classes");
  std::vector<size_t> counts = ds.class_counts();
  for (int c = 0; c < ds.n_classes; ++c)
    if (counts[static_cast<size_t>(c)] == 0)
      throw EmptyClass("class " + std::to_string(c) + " has no training rows");
  return ds.n_classes == 2 ? 1 : ds.n_classes;
}

}  // namespace

double logreg_loss_grad(const FeatureDataset& ds, const std::vector<size_t>& rows,
                        const std::vector<uint8_t>& y01, const Eigen::VectorXd& w, double b,
                        double l2, Eigen::VectorXd& grad_w, double& grad_b) {
  grad_w = l2 * w;
  grad_b = 0.0;
  double loss = 0.0;
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  for (size_t i : rows) {
    RowRef x = ds.row(i);
    const double z = x.dot(w) + b;
    const double y = static_cast<double>(y01[i]);
    loss += bce_from_logit(z, y);
    const double residual = (sigmoid(z) - y) * inv_m;
    x.add_scaled_to(residual, grad_w);
    grad_b += residual;
  }
  return loss * inv_m + 0.5 * l2 * w.squaredNorm();
}

LinearModel logreg_train(const FeatureDataset& ds, const LogRegParams& params, uint64_t seed) {
  if (params.lr <= 0.0 || params.epochs < 1 || params.batch_size < 1 || params.l2 < 0.0)
    throw ConfigError("bad logistic regression parameters");
  const int n_scores = check_classes(ds);
  const size_t n = ds.size();

  LinearModel model;
  model.kind = LinearKind::Logistic;
  model.n_classes = ds.n_classes;
  model.weights = Eigen::MatrixXd::Zero(n_scores, ds.dim());
  model.bias = Eigen::VectorXd::Zero(n_scores);

  for (int s = 0; s < n_scores; ++s) {
    const int positive = (n_scores == 1) ? 1 : s;
    std::vector<uint8_t> y01(n);
    for (size_t i = 0; i < n; ++i) y01[i] = ds.labels[i] == positive ? 1 : 0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(ds.dim());
    double b = 0.0;
    Eigen::VectorXd grad_w(ds.dim());
    double grad_b = 0.0;

    Rng rng(mix_seed(seed, static_cast<uint64_t>(s)));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<size_t> batch;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(order);
      for (size_t start = 0; start < n; start += static_cast<size_t>(params.batch_size)) {
        const size_t stop = std::min(n, start + static_cast<size_t>(params.batch_size));
        batch.assign(order.begin() + static_cast<long>(start),
                     order.begin() + static_cast<long>(stop));
        const double loss = logreg_loss_grad(ds, batch, y01, w, b, params.l2, grad_w, grad_b);
        if (!std::isfinite(loss)) throw NonFiniteLoss("logistic regression loss diverged");
        w -= params.lr * grad_w;
        b -= params.lr * grad_b;
      }
    }
    model.weights.row(s) = w.transpose();
    model.bias[s] = b;
  }
  return model;
}

void svm_step(Eigen::VectorXd& w, double& b, RowRef x, int y_pm, double reg_lambda,
              long long t) {
  const double eta = 1.0 / (reg_lambda * static_cast<double>(t));
  const double margin = static_cast<double>(y_pm) * (x.dot(w) + b);
  w *= 1.0 - eta * reg_lambda;
  if (margin < 1.0) {
    x.add_scaled_to(eta * static_cast<double>(y_pm), w);
    b += eta * static_cast<double>(y_pm);
  }
}

double svm_objective(const FeatureDataset& ds, const std::vector<int8_t>& y_pm,
                     const Eigen::VectorXd& w, double b, double reg_lambda) {
  double hinge = 0.0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const double margin = static_cast<double>(y_pm[i]) * (ds.row(i).dot(w) + b);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * reg_lambda * w.squaredNorm() + hinge / static_cast<double>(ds.size());
}

LinearModel svm_train(const FeatureDataset& ds, const SvmParams& params, uint64_t seed) {
  if (params.reg_lambda <= 0.0 || params.epochs < 1)
    throw ConfigError("bad SVM parameters");
  const int n_scores = check_classes(ds);
  const size_t n = ds.size();

  LinearModel model;
  model.kind = LinearKind::Svm;
  model.n_classes = ds.n_classes;
  model.weights = Eigen::MatrixXd::Zero(n_scores, ds.dim());
  model.bias = Eigen::VectorXd::Zero(n_scores);

  for (int s = 0; s < n_scores; ++s) {
    const int positive = (n_scores == 1) ? 1 : s;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(ds.dim());
    double b = 0.0;

    Rng rng(mix_seed(seed, static_cast<uint64_t>(s)));
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    long long t = 1;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(order);
      for (size_t i : order) {
        const int y_pm = ds.labels[i] == positive ? 1 : -1;
        svm_step(w, b, ds.row(i), y_pm, params.reg_lambda, t++);
      }
    }
    if (!w.allFinite() || !std::isfinite(b)) throw NonFiniteLoss("SVM weights diverged");
    model.weights.row(s) = w.transpose();
    model.bias[s] = b;
  }
  return model;
}

Eigen::VectorXd linear_scores(const LinearModel& model, RowRef x) {
  Eigen::VectorXd scores = model.bias;
  if (x.sparse) {
    for (const auto& [id, value] : x.sparse->entries) scores += value * model.weights.col(id);
  } else {
    scores += model.weights * *x.dense;
  }
  return scores;
}

int linear_predict(const LinearModel& model, RowRef x) {
  Eigen::VectorXd scores = linear_scores(model, x);
  if (model.binary()) return scores[0] > 0.0 ? 1 : 0;
  int best = 0;
  for (int c = 1; c < static_cast<int>(scores.size()); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

int linear_predict(const LinearModel& model, const SparseVector& x) {
  RowRef r;
  r.sparse = &x;
  return linear_predict(model, r);
}

int linear_predict(const LinearModel& model, const DenseVector& x) {
  RowRef r;
  r.dense = &x;
  return linear_predict(model, r);
}

}  // namespace olidtk
