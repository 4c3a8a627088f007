#pragma once

#include <cstdint>
#include <vector>

#include "olidtk/features.hpp"

namespace olidtk {

// Read-only view of one feature row, sparse or dense.
struct RowRef {
  const SparseVector* sparse = nullptr;
  const DenseVector* dense = nullptr;

  int dim() const;
  double dot(const Eigen::VectorXd& w) const;
  void add_scaled_to(double a, Eigen::VectorXd& out) const;  // out += a * x
  double feature(int j) const;  // 0 for absent sparse entries
};

// Feature rows with parallel class labels. Exactly one of the two row
// stores is populated (dense wins when both would be).
struct FeatureDataset {
  std::vector<SparseVector> sparse_rows;
  std::vector<DenseVector> dense_rows;
  std::vector<int> labels;
  int n_classes = 0;

  bool is_sparse() const { return dense_rows.empty(); }
  size_t size() const { return labels.size(); }
  int dim() const;
  RowRef row(size_t i) const;
  std::vector<size_t> class_counts() const;
};

// Index-level resampling; the FeatureDataset samplers and the sequence-model
// training path share these.
std::vector<size_t> undersample_indices(const std::vector<int>& labels, int n_classes,
                                        uint64_t seed);
std::vector<size_t> oversample_indices(const std::vector<int>& labels, int n_classes,
                                       uint64_t seed);

// Expands sparse rows into dense vectors (needed by SMOTE; the caller is
// responsible for warning about the memory cost).
FeatureDataset densify(const FeatureDataset& ds);

// Downsamples every class without replacement to the minority-class count.
FeatureDataset random_undersample(const FeatureDataset& ds, uint64_t seed);

// Upsamples every class with replacement to the majority-class count; all
// original rows are retained.
FeatureDataset random_oversample(const FeatureDataset& ds, uint64_t seed);

// Synthetic minority oversampling: each synthetic row is
//   x_new = x_i + u * (x_nn - x_i),  u uniform in [0, 1),
// where x_nn is one of the k nearest minority neighbors of x_i under
// Euclidean distance (exact brute-force search, distance ties broken by row
// index). Classes are balanced to the majority count. Dense rows only.
FeatureDataset smote(const FeatureDataset& ds, int k, uint64_t seed);

}  // namespace olidtk
