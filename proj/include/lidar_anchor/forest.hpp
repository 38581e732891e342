#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lidar_anchor/features.hpp"

namespace lidar_anchor {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 0;         ///< 0: grow until the other stopping rules apply
  int min_samples_leaf = 2;
  int max_features = 0;      ///< 0: ceil(n_features / 3)
  std::uint64_t seed = 42;
  bool bootstrap = true;
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;     ///< mean target of the node's samples
  int n_samples = 0;      ///< weighted by bootstrap multiplicity
  double impurity = 0.0;  ///< target variance
};

/// Nodes in depth-first creation order; node 0 is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;
  /// Goes left iff x[feature] <= threshold.
  double predict(std::span<const double> x) const;
};

/// Row-major design matrix with one target per row.
struct SampleSet {
  FeatureSchema schema = FeatureSchema::hrf27;
  int n_features = 0;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * static_cast<std::size_t>(n_features), static_cast<std::size_t>(n_features)};
  }
  /// Throws DomainError when the schema or width differs from earlier rows.
  void add(const FeatureVector& features, double target);
};

class RandomForest {
 public:
  FeatureSchema schema = FeatureSchema::hrf27;
  int n_features = 0;
  ForestParams params;
  std::vector<RegressionTree> trees;
  std::optional<double> oob_mae;

  /// Mean of the tree predictions. Throws SchemaError on schema or width
  /// mismatch and DomainError on non-finite features.
  double predict(const FeatureVector& features) const;
  double predict_row(std::span<const double> x) const;
};

/// Bagged CART regression trees. Each tree draws its bootstrap sample and its
/// per-node feature subsets from counter streams keyed by (seed, tree, node),
/// so the model is identical for any thread count. Splits maximize the
/// reduction in squared error over midpoints between distinct sorted values;
/// ties go to the lower feature index, then the lower threshold.
/// Throws DomainError for an empty sample set or invalid parameters.
RandomForest train_forest(const SampleSet& samples, const ForestParams& params);

struct FeatureImportance {
  std::vector<double> weights;  ///< sums to 1
  bool degenerate = false;      ///< no split reduced error; weights are uniform
};

/// Impurity-decrease importance averaged over trees.
FeatureImportance feature_importance(const RandomForest& forest);

std::string model_to_json(const RandomForest& forest);
/// Throws SchemaError for unknown schema ids, version mismatch, empty or
/// malformed trees.
RandomForest model_from_json(const std::string& text);
void save_model(const RandomForest& forest, const std::filesystem::path& path);
RandomForest load_model(const std::filesystem::path& path);

}  // namespace lidar_anchor
