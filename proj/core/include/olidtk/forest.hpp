#pragma once

#include <cstdint>
#include <vector>

#include "olidtk/sampling.hpp"

namespace olidtk {

// Axis-aligned binary split; rows with feature value <= threshold go left.
// Interior nodes keep leaf_class == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_class = -1;

  bool is_leaf() const { return leaf_class >= 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(RowRef x) const;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 40;          // <= 0 means unlimited
  int features_per_split = 0;  // 0 means ceil(sqrt(dim))
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_classes = 0;
};

// Bagged Gini trees: each tree trains on a bootstrap sample and every split
// searches a fresh random feature subset. Tree t draws from its own stream
// mix_seed(seed, t), so the forest is reproducible tree by tree.
ForestModel forest_train(const FeatureDataset& ds, const ForestParams& params, uint64_t seed);

// Plurality vote over the trees; ties go to the lowest class id.
int forest_predict(const ForestModel& model, RowRef x);

// Vote share of the winning class, for probability-style output.
double forest_vote_share(const ForestModel& model, RowRef x, int* winner = nullptr);

double gini_impurity(const std::vector<long long>& class_counts);

// Impurity decrease of a split: parent Gini minus the size-weighted child
// Ginis. Positive values mean the split helps.
double gini_gain(const std::vector<long long>& parent, const std::vector<long long>& left,
                 const std::vector<long long>& right);

}  // namespace olidtk
