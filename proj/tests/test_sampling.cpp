#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "olidtk/errors.hpp"
#include "olidtk/sampling.hpp"
#include "testutil.hpp"

using namespace olidtk;

namespace {

// Dense dataset whose rows carry a unique marker in component 0, so row
// identity survives resampling.
FeatureDataset marked_dataset(const std::vector<int>& class_sizes) {
  FeatureDataset ds;
  ds.n_classes = static_cast<int>(class_sizes.size());
  int marker = 0;
  for (int c = 0; c < ds.n_classes; ++c) {
    for (int i = 0; i < class_sizes[c]; ++i) {
      DenseVector v(2);
      v << static_cast<double>(marker++), static_cast<double>(c);
      ds.dense_rows.push_back(v);
      ds.labels.push_back(c);
    }
  }
  return ds;
}

std::vector<size_t> counts_of(const FeatureDataset& ds) { return ds.class_counts(); }

std::multiset<double> markers(const FeatureDataset& ds) {
  std::multiset<double> m;
  for (const auto& row : ds.dense_rows) m.insert(row(0));
  return m;
}

// Brute-force k nearest neighbors among `points`, excluding `self`;
// distance ties broken by index order.
std::vector<size_t> knn_oracle(const std::vector<DenseVector>& points, size_t self, int k) {
  std::vector<std::pair<double, size_t>> dist;
  for (size_t j = 0; j < points.size(); ++j) {
    if (j == self) continue;
    dist.push_back({(points[self] - points[j]).squaredNorm(), j});
  }
  std::sort(dist.begin(), dist.end());
  std::vector<size_t> out;
  for (int j = 0; j < k && j < static_cast<int>(dist.size()); ++j) out.push_back(dist[j].second);
  return out;
}

}  // namespace

TEST_CASE("undersampling matches the minority count") {
  FeatureDataset ds = marked_dataset({100, 30});
  FeatureDataset out = random_undersample(ds, 1);
  CHECK(counts_of(out) == std::vector<size_t>{30, 30});
  // Every surviving row is an original row.
  auto orig = markers(ds);
  for (double m : markers(out)) CHECK(orig.count(m) == 1);
  // Rows keep their class labels.
  for (size_t i = 0; i < out.size(); ++i) CHECK(out.dense_rows[i](1) == out.labels[i]);
}

TEST_CASE("three-class undersampling hits the smallest class") {
  FeatureDataset out = random_undersample(marked_dataset({50, 20, 10}), 2);
  CHECK(counts_of(out) == std::vector<size_t>{10, 10, 10});
}

TEST_CASE("oversampling matches the majority count and keeps all originals") {
  FeatureDataset ds = marked_dataset({100, 30});
  FeatureDataset out = random_oversample(ds, 3);
  CHECK(counts_of(out) == std::vector<size_t>{100, 100});
  auto got = markers(out);
  for (double m : markers(ds)) CHECK(got.count(m) >= 1);  // originals retained
  auto orig = markers(ds);
  for (double m : got) CHECK(orig.count(m) == 1);  // only copies, nothing new
}

TEST_CASE("already balanced data keeps its row multiset") {
  FeatureDataset ds = marked_dataset({25, 25});
  CHECK(markers(random_undersample(ds, 7)) == markers(ds));
  CHECK(markers(random_oversample(ds, 7)) == markers(ds));
  FeatureDataset sm = smote(ds, 3, 7);
  CHECK(markers(sm) == markers(ds));
}

TEST_CASE("samplers are deterministic in the seed") {
  FeatureDataset ds = marked_dataset({40, 15});
  CHECK(markers(random_undersample(ds, 5)) == markers(random_undersample(ds, 5)));
  CHECK(markers(random_oversample(ds, 5)) == markers(random_oversample(ds, 5)));
  CHECK(markers(random_undersample(ds, 5)) != markers(random_undersample(ds, 6)));

  FeatureDataset s1 = smote(ds, 3, 5);
  FeatureDataset s2 = smote(ds, 3, 5);
  REQUIRE(s1.size() == s2.size());
  for (size_t i = 0; i < s1.size(); ++i)
    CHECK((s1.dense_rows[i] - s2.dense_rows[i]).norm() == 0.0);
}

TEST_CASE("a class with no rows is rejected") {
  FeatureDataset ds = marked_dataset({10, 5});
  ds.n_classes = 3;  // class 2 has no rows
  CHECK_THROWS_AS(random_undersample(ds, 1), EmptyClass);
  CHECK_THROWS_AS(random_oversample(ds, 1), EmptyClass);
}

TEST_CASE("two-point minority interpolates along the diagonal") {
  FeatureDataset ds;
  ds.n_classes = 2;
  for (int i = 0; i < 6; ++i) {  // majority, far away
    DenseVector v(2);
    v << 50.0 + i, 50.0;
    ds.dense_rows.push_back(v);
    ds.labels.push_back(0);
  }
  DenseVector p0(2), p1(2);
  p0 << 0.0, 0.0;
  p1 << 1.0, 1.0;
  ds.dense_rows.push_back(p0);
  ds.labels.push_back(1);
  ds.dense_rows.push_back(p1);
  ds.labels.push_back(1);

  FeatureDataset out = smote(ds, 1, 9);
  CHECK(counts_of(out) == std::vector<size_t>{6, 6});
  // Synthetic rows sit on the segment (u, u), u in [0, 1].
  for (size_t i = ds.size(); i < out.size(); ++i) {
    CHECK(out.labels[i] == 1);
    CHECK(out.dense_rows[i](0) == doctest::Approx(out.dense_rows[i](1)).epsilon(1e-12));
    CHECK(out.dense_rows[i](0) >= 0.0);
    CHECK(out.dense_rows[i](0) <= 1.0);
  }
}

TEST_CASE("smote rejects sparse rows and tiny minorities") {
  FeatureDataset sparse;
  sparse.n_classes = 2;
  sparse.sparse_rows.resize(4);
  for (auto& r : sparse.sparse_rows) r.dim = 3;
  sparse.labels = {0, 0, 0, 1};
  CHECK_THROWS_AS(smote(sparse, 1, 1), SparseUnsupported);
  CHECK_THROWS_AS(smote(sparse, 1, 1), ConfigError);  // categorized as configuration

  FeatureDataset tiny = marked_dataset({5, 2});
  CHECK_THROWS_AS(smote(tiny, 5, 1), TooFewMinoritySamples);
  CHECK_NOTHROW(smote(marked_dataset({5, 3}), 2, 1));  // k < minority count is fine
  CHECK_THROWS_AS(smote(marked_dataset({5, 3}), 0, 1), ConfigError);
}

TEST_CASE("densify expands sparse rows without changing values") {
  FeatureDataset ds;
  ds.n_classes = 2;
  SparseVector a;
  a.dim = 4;
  a.entries = {{0, 2.0}, {3, 1.0}};
  SparseVector b;
  b.dim = 4;
  b.entries = {{1, 5.0}};
  ds.sparse_rows = {a, b};
  ds.labels = {0, 1};

  FeatureDataset dense = densify(ds);
  CHECK_FALSE(dense.is_sparse());
  REQUIRE(dense.dense_rows.size() == 2);
  CHECK(dense.dense_rows[0](0) == 2.0);
  CHECK(dense.dense_rows[0](1) == 0.0);
  CHECK(dense.dense_rows[0](3) == 1.0);
  CHECK(dense.dense_rows[1](1) == 5.0);
  CHECK(dense.labels == ds.labels);
}

TEST_CASE("smote geometry: synthetics lie on seed-to-neighbor segments") {
  Rng rng(123);
  for (int trial = 0; trial < 40; ++trial) {
    // Random 2-D minority cloud plus a larger majority.
    int n_min = 4 + static_cast<int>(rng.below(8));
    int n_maj = n_min + 3 + static_cast<int>(rng.below(10));
    int k = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n_min - 1)));

    FeatureDataset ds;
    ds.n_classes = 2;
    std::vector<DenseVector> minority;
    for (int i = 0; i < n_maj; ++i) {
      DenseVector v(2);
      v << rng.uniform(-5, 5), rng.uniform(-5, 5);
      ds.dense_rows.push_back(v);
      ds.labels.push_back(0);
    }
    for (int i = 0; i < n_min; ++i) {
      DenseVector v(2);
      v << rng.uniform(-5, 5), rng.uniform(-5, 5);
      ds.dense_rows.push_back(v);
      ds.labels.push_back(1);
      minority.push_back(v);
    }

    FeatureDataset out = smote(ds, k, rng.next_u64());
    CHECK(counts_of(out) == std::vector<size_t>{static_cast<size_t>(n_maj),
                                                static_cast<size_t>(n_maj)});

    // Seeds cycle round-robin through the minority in row order, so
    // synthetic t belongs to minority point t % n_min; it must sit on a
    // segment to one of that point's k nearest neighbors (oracle-checked).
    size_t n_synth = out.size() - ds.size();
    for (size_t t = 0; t < n_synth; ++t) {
      const DenseVector& s = out.dense_rows[ds.size() + t];
      CHECK(out.labels[ds.size() + t] == 1);
      const DenseVector& seed = minority[t % static_cast<size_t>(n_min)];
      bool on_some_segment = false;
      for (size_t nb : knn_oracle(minority, t % static_cast<size_t>(n_min), k)) {
        DenseVector dir = minority[nb] - seed;
        DenseVector rel = s - seed;
        double denom = dir.squaredNorm();
        double u = denom > 0 ? rel.dot(dir) / denom : 0.0;
        if ((rel - u * dir).norm() <= 1e-9 && u >= -1e-12 && u <= 1.0 + 1e-12)
          on_some_segment = true;
      }
      CHECK(on_some_segment);
    }
  }
}

TEST_CASE("index-level samplers agree with the dataset-level ones") {
  FeatureDataset ds = marked_dataset({20, 8, 5});
  auto idx_u = undersample_indices(ds.labels, ds.n_classes, 77);
  CHECK(idx_u.size() == 15);
  std::map<int, int> per_class;
  for (size_t i : idx_u) per_class[ds.labels[i]]++;
  CHECK(per_class == std::map<int, int>{{0, 5}, {1, 5}, {2, 5}});

  auto idx_o = oversample_indices(ds.labels, ds.n_classes, 77);
  CHECK(idx_o.size() == 60);
  std::set<size_t> unique(idx_o.begin(), idx_o.end());
  CHECK(unique.size() == ds.size());  // all originals appear
}
