#include "olidtk/forest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "olidtk/errors.hpp"
#include "olidtk/rng.hpp"

namespace olidtk {

double gini_impurity(const std::vector<long long>& class_counts) {
  long long total = 0;
  for (long long c : class_counts) total += c;
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (long long c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double gini_gain(const std::vector<long long>& parent, const std::vector<long long>& left,
                 const std::vector<long long>& right) {
  long long n = 0, nl = 0, nr = 0;
  for (long long c : parent) n += c;
  for (long long c : left) nl += c;
  for (long long c : right) nr += c;
  if (n == 0) return 0.0;
  const double wl = static_cast<double>(nl) / static_cast<double>(n);
  const double wr = static_cast<double>(nr) / static_cast<double>(n);
  return gini_impurity(parent) - wl * gini_impurity(left) - wr * gini_impurity(right);
}

namespace {

int majority_class(const std::vector<long long>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c)
    if (counts[static_cast<size_t>(c)] > counts[static_cast<size_t>(best)]) best = c;
  return best;
}

// Floyd's algorithm: k distinct values from [0, d), then sorted so the split
// search scans features in a fixed order.
std::vector<int> sample_features(Rng& rng, int d, int k) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<size_t>(k));
  for (int j = d - k; j < d; ++j) {
    const int r = static_cast<int>(rng.below(static_cast<uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), r) != chosen.end())
      chosen.push_back(j);
    else
      chosen.push_back(r);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

struct TreeBuilder {
  const FeatureDataset& ds;
  const ForestParams& params;
  int features_per_split;
  Rng& rng;
  std::vector<TreeNode>& nodes;

  int build(std::vector<size_t>& indices, int depth) {
    std::vector<long long> counts(static_cast<size_t>(ds.n_classes), 0);
    for (size_t i : indices) counts[static_cast<size_t>(ds.labels[i])]++;

    int nonzero = 0;
    for (long long c : counts) nonzero += c > 0;
    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (nonzero <= 1 || indices.size() < 2 || depth_capped) return make_leaf(counts);

    // Best (feature, threshold) by Gini gain over a random feature subset;
    // the first best encountered wins, so scan order settles ties.
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> values(indices.size());
    std::vector<long long> left(counts.size()), right(counts.size());
    for (int f : sample_features(rng, ds.dim(), features_per_split)) {
      for (size_t r = 0; r < indices.size(); ++r)
        values[r] = {ds.row(indices[r]).feature(f), ds.labels[indices[r]]};
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (size_t r = 0; r + 1 < values.size(); ++r) {
        const size_t y = static_cast<size_t>(values[r].second);
        left[y]++;
        right[y]--;
        if (values[r].first == values[r + 1].first) continue;
        const double gain = gini_gain(counts, left, right);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (values[r].first + values[r + 1].first);
        }
      }
    }
    if (best_feature < 0) return make_leaf(counts);

    std::vector<size_t> left_idx, right_idx;
    for (size_t i : indices) {
      if (ds.row(i).feature(best_feature) <= best_threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<size_t>(id)].feature = best_feature;
    nodes[static_cast<size_t>(id)].threshold = best_threshold;
    const int left_id = build(left_idx, depth + 1);
    const int right_id = build(right_idx, depth + 1);
    nodes[static_cast<size_t>(id)].left = left_id;
    nodes[static_cast<size_t>(id)].right = right_id;
    return id;
  }

  int make_leaf(const std::vector<long long>& counts) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<size_t>(id)].leaf_class = majority_class(counts);
    return id;
  }
};

}  // namespace

int DecisionTree::predict(RowRef x) const {
  int id = 0;
  while (!nodes[static_cast<size_t>(id)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<size_t>(id)];
    id = x.feature(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<size_t>(id)].leaf_class;
}

ForestModel forest_train(const FeatureDataset& ds, const ForestParams& params, uint64_t seed) {
  if (params.n_trees < 1) throw ConfigError("forest needs at least one tree");
  if (ds.size() == 0) throw EmptyCorpus("forest needs at least one row");
  const std::vector<size_t> counts = ds.class_counts();
  for (int c = 0; c < ds.n_classes; ++c)
    if (counts[static_cast<size_t>(c)] == 0)
      throw EmptyClass("class " + std::to_string(c) + " has no training rows");

  const int d = ds.dim();
  int fps = params.features_per_split;
  if (fps <= 0) fps = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  fps = std::min(fps, d);

  ForestModel model;
  model.n_classes = ds.n_classes;
  model.trees.resize(static_cast<size_t>(params.n_trees));
  const size_t n = ds.size();
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(t)));
    std::vector<size_t> bootstrap(n);
    for (size_t i = 0; i < n; ++i) bootstrap[i] = static_cast<size_t>(rng.below(n));
    DecisionTree& tree = model.trees[static_cast<size_t>(t)];
    TreeBuilder builder{ds, params, fps, rng, tree.nodes};
    builder.build(bootstrap, 0);
  }
  return model;
}

int forest_predict(const ForestModel& model, RowRef x) {
  int winner = 0;
  forest_vote_share(model, x, &winner);
  return winner;
}

double forest_vote_share(const ForestModel& model, RowRef x, int* winner) {
  std::vector<long long> votes(static_cast<size_t>(model.n_classes), 0);
  for (const DecisionTree& tree : model.trees) votes[static_cast<size_t>(tree.predict(x))]++;
  const int best = majority_class(votes);
  if (winner) *winner = best;
  return static_cast<double>(votes[static_cast<size_t>(best)]) /
         static_cast<double>(model.trees.size());
}

}  // namespace olidtk
