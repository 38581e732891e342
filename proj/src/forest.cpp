#include "lidar_anchor/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include <json.hpp>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/parallel.hpp"
#include "lidar_anchor/rng.hpp"

namespace lidar_anchor {

using json = nlohmann::json;

namespace {

constexpr const char* kModelFormat = "lidar-anchor-forest";
constexpr int kModelVersion = 1;

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

void SampleSet::add(const FeatureVector& features, double target) {
  const int width = static_cast<int>(features.values.size());
  if (y.empty() && x.empty()) {
    schema = features.schema;
    n_features = width;
  } else if (features.schema != schema || width != n_features) {
    throw DomainError("sample set: feature schema or width differs from earlier samples");
  }
  x.insert(x.end(), features.values.begin(), features.values.end());
  y.push_back(target);
}

double RandomForest::predict_row(std::span<const double> x) const {
  double sum = 0.0;
  for (const RegressionTree& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

double RandomForest::predict(const FeatureVector& features) const {
  if (features.schema != schema) {
    throw SchemaError("model expects " + to_string(schema) + " features, got " + to_string(features.schema));
  }
  if (static_cast<int>(features.values.size()) != n_features) {
    throw SchemaError("model expects " + std::to_string(n_features) + " features, got " +
                      std::to_string(features.values.size()));
  }
  for (double v : features.values) {
    if (!std::isfinite(v)) throw DomainError("non-finite feature value");
  }
  return predict_row(features.values);
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const SampleSet& s, const ForestParams& p, int mtry, std::uint64_t key)
      : s_(s), p_(p), mtry_(mtry), key_(key) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  double feature_value(std::size_t row, int f) const {
    return s_.x[row * static_cast<std::size_t>(s_.n_features) + static_cast<std::size_t>(f)];
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = rows.size();

    double sum = 0.0;
    for (std::size_t r : rows) sum += s_.y[r];
    const double mean = sum / static_cast<double>(n);
    double sse = 0.0;
    bool constant = true;
    for (std::size_t r : rows) {
      sse += (s_.y[r] - mean) * (s_.y[r] - mean);
      constant = constant && s_.y[r] == s_.y[rows.front()];
    }
    {
      TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
      node.value = mean;
      node.n_samples = static_cast<int>(n);
      node.impurity = sse / static_cast<double>(n);
    }

    const bool depth_capped = p_.max_depth > 0 && depth >= p_.max_depth;
    if (depth_capped || constant || n < 2 * static_cast<std::size_t>(p_.min_samples_leaf)) return index;

    const Split split = find_split(rows, mean, static_cast<std::uint64_t>(index));
    if (split.feature < 0) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (feature_value(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  // Visits features in a random order until mtry non-constant ones have been
  // scanned (or all features are exhausted).
  Split find_split(const std::vector<std::size_t>& rows, double mean, std::uint64_t node_index) {
    const int d = s_.n_features;
    CounterRng rng(CounterRng::derive(key_, node_index));
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);

    const std::size_t n = rows.size();
    const double nd = static_cast<double>(n);
    const auto min_leaf = static_cast<std::size_t>(p_.min_samples_leaf);
    std::vector<std::pair<double, double>> sorted(n);
    double total = 0.0;
    for (std::size_t r : rows) total += s_.y[r] - mean;
    const double base = total * total / nd;

    Split best;
    int scanned = 0;
    for (int k = 0; k < d && scanned < mtry_; ++k) {
      const int j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - k)));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
      const int f = perm[static_cast<std::size_t>(k)];

      for (std::size_t i = 0; i < n; ++i) sorted[i] = {feature_value(rows[i], f), s_.y[rows[i]] - mean};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;
      ++scanned;

      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_sum += sorted[i].second;
        const double a = sorted[i].first;
        const double b = sorted[i + 1].first;
        if (a == b) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - base;
        double threshold = a + (b - a) * 0.5;
        if (!(threshold < b)) threshold = a;
        const bool better = best.feature < 0 || gain > best.gain ||
                            (gain == best.gain && (f < best.feature || (f == best.feature && threshold < best.threshold)));
        if (better) best = {f, threshold, gain};
      }
    }
    return best;
  }

  const SampleSet& s_;
  const ForestParams& p_;
  int mtry_;
  std::uint64_t key_;
  RegressionTree tree_;
};

void validate_params(const ForestParams& p) {
  if (p.n_trees < 1) throw DomainError("forest: n_trees must be at least 1");
  if (p.max_depth < 0) throw DomainError("forest: max_depth must be non-negative");
  if (p.min_samples_leaf < 1) throw DomainError("forest: min_samples_leaf must be at least 1");
  if (p.max_features < 0) throw DomainError("forest: max_features must be non-negative");
}

}  // namespace

RandomForest train_forest(const SampleSet& samples, const ForestParams& params) {
  validate_params(params);
  const std::size_t n = samples.size();
  if (n == 0) throw DomainError("forest: empty sample set");
  if (samples.n_features < 1) throw DomainError("forest: samples have no features");
  if (samples.x.size() != n * static_cast<std::size_t>(samples.n_features)) {
    throw DomainError("forest: design matrix size does not match targets");
  }
  for (double v : samples.x) {
    if (!std::isfinite(v)) throw DomainError("forest: non-finite feature value");
  }
  for (double v : samples.y) {
    if (!std::isfinite(v)) throw DomainError("forest: non-finite target");
  }

  const int d = samples.n_features;
  const int mtry = params.max_features > 0 ? std::min(params.max_features, d) : (d + 2) / 3;

  RandomForest forest;
  forest.schema = samples.schema;
  forest.n_features = d;
  forest.params = params;
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));
  std::vector<std::vector<std::uint32_t>> in_bag(static_cast<std::size_t>(params.n_trees));

  parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
    const std::uint64_t key = params.seed ^ static_cast<std::uint64_t>(t);
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      CounterRng rng(key);
      auto& counts = in_bag[t];
      counts.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(rng.below(n));
        ++counts[rows[i]];
      }
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder(samples, params, mtry, key);
    forest.trees[t] = builder.build(std::move(rows));
  });

  if (params.bootstrap) {
    double abs_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      std::size_t votes = 0;
      for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        if (in_bag[t][i] != 0) continue;
        sum += forest.trees[t].predict(samples.row(i));
        ++votes;
      }
      if (votes == 0) continue;
      abs_sum += std::abs(sum / static_cast<double>(votes) - samples.y[i]);
      ++counted;
    }
    if (counted > 0) forest.oob_mae = abs_sum / static_cast<double>(counted);
  }
  return forest;
}

FeatureImportance feature_importance(const RandomForest& forest) {
  const auto d = static_cast<std::size_t>(forest.n_features);
  FeatureImportance out;
  out.weights.assign(d, 0.0);
  for (const RegressionTree& tree : forest.trees) {
    std::vector<double> per_tree(d, 0.0);
    const double root_n = tree.nodes.front().n_samples;
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) continue;
      const TreeNode& l = tree.nodes[static_cast<std::size_t>(node.left)];
      const TreeNode& r = tree.nodes[static_cast<std::size_t>(node.right)];
      const double decrease = node.n_samples * node.impurity - l.n_samples * l.impurity -
                              r.n_samples * r.impurity;
      per_tree[static_cast<std::size_t>(node.feature)] += std::max(0.0, decrease) / root_n;
    }
    for (std::size_t f = 0; f < d; ++f) out.weights[f] += per_tree[f];
  }
  double total = 0.0;
  for (double w : out.weights) total += w;
  if (!(total > 0.0)) {
    out.degenerate = true;
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(d));
    return out;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

std::string model_to_json(const RandomForest& forest) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["schema_id"] = to_string(forest.schema);
  j["n_features"] = forest.n_features;
  const ForestParams& p = forest.params;
  j["params"] = {{"n_trees", p.n_trees},
                 {"max_depth", p.max_depth},
                 {"min_samples_leaf", p.min_samples_leaf},
                 {"max_features", p.max_features},
                 {"seed", p.seed},
                 {"bootstrap", p.bootstrap}};
  j["oob_mae"] = forest.oob_mae ? json(*forest.oob_mae) : json(nullptr);
  json trees = json::array();
  for (const RegressionTree& t : forest.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array(), n_samples = json::array(), impurity = json::array();
    for (const TreeNode& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
      n_samples.push_back(n.n_samples);
      impurity.push_back(n.impurity);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"value", value},
                     {"n_samples", n_samples},
                     {"impurity", impurity}});
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

namespace {

void check_tree(const RegressionTree& t, int n_features, std::size_t index) {
  const std::string where = "model tree " + std::to_string(index) + ": ";
  const auto count = static_cast<int>(t.nodes.size());
  if (count == 0) throw SchemaError(where + "no nodes");
  std::vector<int> parents(t.nodes.size(), 0);
  for (int i = 0; i < count; ++i) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
    if (!std::isfinite(n.value) || !std::isfinite(n.threshold)) throw SchemaError(where + "non-finite value");
    if (n.feature < 0) continue;
    if (n.feature >= n_features) throw SchemaError(where + "feature index out of range");
    // Children always follow their parent in creation order, which rules out cycles.
    for (int c : {n.left, n.right}) {
      if (c <= i || c >= count) throw SchemaError(where + "invalid child index");
      ++parents[static_cast<std::size_t>(c)];
    }
  }
  if (parents[0] != 0) throw SchemaError(where + "root has a parent");
  for (int i = 1; i < count; ++i) {
    if (parents[static_cast<std::size_t>(i)] != 1) throw SchemaError(where + "node reached more than once or never");
  }
}

template <typename T>
std::vector<T> array_of(const json& tree, const char* key) {
  if (!tree.contains(key) || !tree.at(key).is_array()) {
    throw SchemaError(std::string("model tree lacks array '") + key + "'");
  }
  return tree.at(key).get<std::vector<T>>();
}

}  // namespace

RandomForest model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != kModelFormat) throw SchemaError("not a forest model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) {
      throw SchemaError("model version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kModelVersion) + ")");
    }
    RandomForest f;
    f.schema = schema_from_string(j.at("schema_id").get<std::string>());
    f.n_features = j.at("n_features").get<int>();
    if (f.n_features < 1) throw SchemaError("model has no features");
    if (f.schema == FeatureSchema::hrf27 && f.n_features != kHrfFeatureCount) {
      throw SchemaError("hrf27 model must have 27 features");
    }
    const json& p = j.at("params");
    f.params.n_trees = p.at("n_trees").get<int>();
    f.params.max_depth = p.at("max_depth").get<int>();
    f.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    f.params.max_features = p.at("max_features").get<int>();
    f.params.seed = p.at("seed").get<std::uint64_t>();
    f.params.bootstrap = p.at("bootstrap").get<bool>();
    if (j.contains("oob_mae") && !j.at("oob_mae").is_null()) f.oob_mae = j.at("oob_mae").get<double>();

    const json& trees = j.at("trees");
    if (!trees.is_array() || trees.empty()) throw SchemaError("model has no trees");
    for (const json& t : trees) {
      const auto feature = array_of<int>(t, "feature");
      const auto threshold = array_of<double>(t, "threshold");
      const auto left = array_of<int>(t, "left");
      const auto right = array_of<int>(t, "right");
      const auto value = array_of<double>(t, "value");
      const auto n_samples = array_of<int>(t, "n_samples");
      const auto impurity = array_of<double>(t, "impurity");
      const std::size_t m = feature.size();
      if (threshold.size() != m || left.size() != m || right.size() != m || value.size() != m ||
          n_samples.size() != m || impurity.size() != m) {
        throw SchemaError("model tree arrays differ in length");
      }
      RegressionTree tree;
      tree.nodes.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        tree.nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i], n_samples[i], impurity[i]};
      }
      check_tree(tree, f.n_features, f.trees.size());
      f.trees.push_back(std::move(tree));
    }
    return f;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const RandomForest& forest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << model_to_json(forest);
  if (!out) throw IoError("short write to " + path.string());
}

RandomForest load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return model_from_json({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace lidar_anchor
