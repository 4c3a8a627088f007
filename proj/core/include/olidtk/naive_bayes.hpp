#pragma once

#include <Eigen/Core>

#include "olidtk/sampling.hpp"

namespace olidtk {

// Multinomial naive Bayes over non-negative feature counts (raw counts or
// tf-idf weights both work; weights act as fractional counts).
struct NBModel {
  Eigen::VectorXd log_prior;       // n_classes
  Eigen::MatrixXd log_likelihood;  // n_classes x vocab
  double alpha = 1.0;

  int n_classes() const { return static_cast<int>(log_prior.size()); }
  int dim() const { return static_cast<int>(log_likelihood.cols()); }
};

// log_prior[c]   = ln(count(c) / n)
// log_likelihood[c][t] = ln((tc + alpha) / (sum_t' tc' + alpha * V))
// where tc is the summed feature value of token t over class-c rows.
// Every class must have at least one row.
NBModel nb_train(const FeatureDataset& ds, double alpha = 1.0);

// Unnormalized log posterior per class: log_prior + sum_j x_j * log_likelihood.
Eigen::VectorXd nb_log_scores(const NBModel& model, RowRef x);

// Argmax of the log scores; ties go to the lowest class id.
int nb_predict(const NBModel& model, RowRef x);
int nb_predict(const NBModel& model, const SparseVector& x);

// Normalized posterior via log-sum-exp; rows sum to one.
Eigen::VectorXd nb_posterior(const NBModel& model, RowRef x);

}  // namespace olidtk
