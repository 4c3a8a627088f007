#include "olidtk/naive_bayes.hpp"

#include <cmath>
#include <string>

#include "olidtk/errors.hpp"

namespace olidtk {

NBModel nb_train(const FeatureDataset& ds, double alpha) {
  if (ds.size() == 0) throw EmptyCorpus("naive Bayes needs at least one row");
  if (alpha <= 0.0) throw ConfigError("naive Bayes smoothing alpha must be > 0");
  const int n_classes = ds.n_classes;
  const int dim = ds.dim();

  Eigen::VectorXd class_count = Eigen::VectorXd::Zero(n_classes);
  Eigen::MatrixXd token_count = Eigen::MatrixXd::Zero(n_classes, dim);
  for (size_t i = 0; i < ds.size(); ++i) {
    const int c = ds.labels[i];
    class_count[c] += 1.0;
    if (ds.is_sparse()) {
      for (const auto& [id, value] : ds.sparse_rows[i].entries) token_count(c, id) += value;
    } else {
      token_count.row(c) += ds.dense_rows[i].transpose();
    }
  }
  for (int c = 0; c < n_classes; ++c)
    if (class_count[c] == 0.0)
      throw EmptyClass("class " + std::to_string(c) + " has no training rows");

  NBModel model;
  model.alpha = alpha;
  model.log_prior = (class_count / static_cast<double>(ds.size())).array().log();
  model.log_likelihood.resize(n_classes, dim);
  for (int c = 0; c < n_classes; ++c) {
    const double denom = token_count.row(c).sum() + alpha * dim;
    model.log_likelihood.row(c) =
        ((token_count.row(c).array() + alpha) / denom).log();
  }
  return model;
}

Eigen::VectorXd nb_log_scores(const NBModel& model, RowRef x) {
  Eigen::VectorXd scores = model.log_prior;
  if (x.sparse) {
    for (const auto& [id, value] : x.sparse->entries)
      scores += value * model.log_likelihood.col(id);
  } else {
    scores += model.log_likelihood * *x.dense;
  }
  return scores;
}

int nb_predict(const NBModel& model, RowRef x) {
  Eigen::VectorXd scores = nb_log_scores(model, x);
  int best = 0;
  for (int c = 1; c < model.n_classes(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

int nb_predict(const NBModel& model, const SparseVector& x) {
  RowRef r;
  r.sparse = &x;
  return nb_predict(model, r);
}

Eigen::VectorXd nb_posterior(const NBModel& model, RowRef x) {
  Eigen::VectorXd scores = nb_log_scores(model, x);
  const double m = scores.maxCoeff();
  Eigen::VectorXd p = (scores.array() - m).exp();
  return p / p.sum();
}

}  // namespace olidtk
