#include "olidtk/sampling.hpp"

#include <algorithm>
#include <string>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

namespace {

std::vector<std::vector<size_t>> indices_by_class(const std::vector<int>& labels, int n_classes,
                                                  bool require_nonempty) {
  std::vector<std::vector<size_t>> by_class(static_cast<size_t>(n_classes));
  for (size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<size_t>(labels[i])].push_back(i);
  if (require_nonempty) {
    for (size_t c = 0; c < by_class.size(); ++c)
      if (by_class[c].empty())
        throw EmptyClass("class " + std::to_string(c) + " has no rows");
  }
  return by_class;
}

FeatureDataset take_rows(const FeatureDataset& ds, const std::vector<size_t>& rows) {
  FeatureDataset out;
  out.n_classes = ds.n_classes;
  out.labels.reserve(rows.size());
  for (size_t i : rows) out.labels.push_back(ds.labels[i]);
  if (ds.is_sparse()) {
    out.sparse_rows.reserve(rows.size());
    for (size_t i : rows) out.sparse_rows.push_back(ds.sparse_rows[i]);
  } else {
    out.dense_rows.reserve(rows.size());
    for (size_t i : rows) out.dense_rows.push_back(ds.dense_rows[i]);
  }
  return out;
}

}  // namespace

int RowRef::dim() const {
  if (dense) return static_cast<int>(dense->size());
  return sparse ? sparse->dim : 0;
}

double RowRef::dot(const Eigen::VectorXd& w) const {
  if (dense) return dense->dot(w);
  double s = 0.0;
  for (const auto& [id, value] : sparse->entries) s += value * w[id];
  return s;
}

void RowRef::add_scaled_to(double a, Eigen::VectorXd& out) const {
  if (dense) {
    out += a * *dense;
    return;
  }
  for (const auto& [id, value] : sparse->entries) out[id] += a * value;
}

double RowRef::feature(int j) const {
  if (dense) return (*dense)[j];
  return sparse->at(j);
}

int FeatureDataset::dim() const {
  if (!dense_rows.empty()) return static_cast<int>(dense_rows.front().size());
  if (!sparse_rows.empty()) return sparse_rows.front().dim;
  return 0;
}

RowRef FeatureDataset::row(size_t i) const {
  RowRef r;
  if (is_sparse())
    r.sparse = &sparse_rows[i];
  else
    r.dense = &dense_rows[i];
  return r;
}

std::vector<size_t> FeatureDataset::class_counts() const {
  std::vector<size_t> counts(static_cast<size_t>(n_classes), 0);
  for (int y : labels) counts[static_cast<size_t>(y)]++;
  return counts;
}

FeatureDataset densify(const FeatureDataset& ds) {
  if (!ds.is_sparse()) return ds;
  FeatureDataset out;
  out.n_classes = ds.n_classes;
  out.labels = ds.labels;
  out.dense_rows.reserve(ds.sparse_rows.size());
  for (const SparseVector& row : ds.sparse_rows) {
    DenseVector v = DenseVector::Zero(row.dim);
    for (const auto& [id, value] : row.entries) v[id] = value;
    out.dense_rows.push_back(std::move(v));
  }
  return out;
}

std::vector<size_t> undersample_indices(const std::vector<int>& labels, int n_classes,
                                        uint64_t seed) {
  std::vector<std::vector<size_t>> by_class = indices_by_class(labels, n_classes, true);
  size_t minority = labels.size();
  for (const auto& idx : by_class) minority = std::min(minority, idx.size());

  Rng rng(seed);
  std::vector<size_t> picked;
  for (auto& idx : by_class) {
    rng.shuffle(idx);
    idx.resize(minority);
    std::sort(idx.begin(), idx.end());
    picked.insert(picked.end(), idx.begin(), idx.end());
  }
  return picked;
}

std::vector<size_t> oversample_indices(const std::vector<int>& labels, int n_classes,
                                       uint64_t seed) {
  std::vector<std::vector<size_t>> by_class = indices_by_class(labels, n_classes, true);
  size_t majority = 0;
  for (const auto& idx : by_class) majority = std::max(majority, idx.size());

  Rng rng(seed);
  std::vector<size_t> picked;
  for (const auto& idx : by_class) {
    picked.insert(picked.end(), idx.begin(), idx.end());
    for (size_t extra = idx.size(); extra < majority; ++extra)
      picked.push_back(idx[rng.below(idx.size())]);
  }
  return picked;
}

FeatureDataset random_undersample(const FeatureDataset& ds, uint64_t seed) {
  return take_rows(ds, undersample_indices(ds.labels, ds.n_classes, seed));
}

FeatureDataset random_oversample(const FeatureDataset& ds, uint64_t seed) {
  return take_rows(ds, oversample_indices(ds.labels, ds.n_classes, seed));
}

FeatureDataset smote(const FeatureDataset& ds, int k, uint64_t seed) {
  if (ds.is_sparse())
    throw SparseUnsupported(
        "smote needs dense rows; densify the dataset or use random oversampling");
  if (k < 1) throw ConfigError("smote k must be >= 1");

  std::vector<std::vector<size_t>> by_class = indices_by_class(ds.labels, ds.n_classes, true);
  size_t majority = 0;
  for (const auto& idx : by_class) majority = std::max(majority, idx.size());

  FeatureDataset out = ds;
  Rng rng(seed);
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::vector<size_t>& members = by_class[static_cast<size_t>(c)];
    const size_t n = members.size();
    if (n >= majority) continue;
    if (n <= static_cast<size_t>(k))
      throw TooFewMinoritySamples("class " + std::to_string(c) + " has " + std::to_string(n) +
                                  " rows, need more than k=" + std::to_string(k));

    // Exact k nearest minority neighbors per member; ties resolved by index.
    std::vector<std::vector<size_t>> neighbors(n);
    std::vector<std::pair<double, size_t>> dist(n - 1);
    for (size_t a = 0; a < n; ++a) {
      size_t w = 0;
      for (size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        double d = (ds.dense_rows[members[a]] - ds.dense_rows[members[b]]).squaredNorm();
        dist[w++] = {d, b};
      }
      std::sort(dist.begin(), dist.end());
      neighbors[a].reserve(static_cast<size_t>(k));
      for (int j = 0; j < k; ++j) neighbors[a].push_back(dist[static_cast<size_t>(j)].second);
    }

    // Seed points cycle through the class so synthesis spreads evenly.
    size_t needed = majority - n;
    for (size_t t = 0; t < needed; ++t) {
      size_t a = t % n;
      size_t b = neighbors[a][rng.below(static_cast<uint64_t>(k))];
      double u = rng.uniform01();
      const DenseVector& xa = ds.dense_rows[members[a]];
      const DenseVector& xb = ds.dense_rows[members[b]];
      out.dense_rows.push_back(xa + u * (xb - xa));
      out.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace olidtk
