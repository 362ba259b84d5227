#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptsent/csv.hpp"

namespace promptsent {

enum class FeatureKind { continuous, categorical };
FeatureKind parse_feature_kind(std::string_view name);
std::string_view to_string(FeatureKind kind) noexcept;

inline constexpr std::size_t kMaxCategoricalLevels = 64;

// Categorical values are stored as level indices into `levels`.
struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<double> values;
  std::vector<std::string> levels;
};

// Column-major training or evaluation data. labels index class_names, which
// are sorted. An unlabeled dataset has empty labels.
struct Dataset {
  std::vector<FeatureColumn> features;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  std::size_t dropped = 0;  // source rows skipped for missing values

  std::size_t size() const noexcept { return features.empty() ? labels.size() : features.front().values.size(); }
  std::size_t feature_index(std::string_view name) const;
};

// Builds a dataset from table columns. Rows with a missing outcome or
// feature value are dropped and counted. Categorical levels and class names
// are sorted strings.
Dataset make_dataset(const csv::Table& table, const std::string& outcome,
                     const std::vector<std::string>& features,
                     const std::vector<std::string>& categorical);

enum class ClassWeighting { none, inverse_probability };
ClassWeighting parse_class_weighting(std::string_view name);
std::string_view to_string(ClassWeighting w) noexcept;

struct RFConfig {
  std::size_t max_depth = 6;
  std::size_t min_split = 21;
  std::size_t min_leaf = 8;
  std::size_t n_trees = 120;
  // floor(sqrt(p)) when unset, at least 1.
  std::optional<std::size_t> features_per_split;
  std::uint64_t seed = 0;
  ClassWeighting class_weighting = ClassWeighting::inverse_probability;
  unsigned jobs = 1;

  std::size_t mtry(std::size_t n_features) const;
  void validate() const;
};

// n / (n_classes * count(class)) per element. Throws when a class in
// [0, n_classes) has no element.
std::vector<double> inverse_probability_weights(std::span<const std::size_t> labels, std::size_t n_classes);

struct TreeNode {
  // -1 marks a leaf.
  std::int32_t feature = -1;
  // Continuous: value <= threshold goes left. Categorical: level bit set in
  // left_levels goes left.
  double threshold = 0.0;
  std::uint64_t left_levels = 0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t n_samples = 0;  // bootstrap elements reaching the node
  std::vector<double> proportions;  // weighted class proportions

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root first, preorder
  std::vector<std::uint32_t> in_bag;  // bootstrap draw, sorted

  std::size_t depth() const;
  bool operator==(const Tree&) const = default;
};

struct FeatureInfo {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<std::string> levels;

  bool operator==(const FeatureInfo&) const = default;
};

struct Forest {
  RFConfig config;
  std::vector<FeatureInfo> features;
  std::vector<std::string> class_names;
  std::size_t n_train = 0;
  std::vector<Tree> trees;

  std::size_t feature_index(std::string_view name) const;
};

// Grows config.n_trees CART trees on bootstrap samples, in parallel across
// trees with per-tree seeds derived from config.seed.
Forest fit_forest(const Dataset& data, const RFConfig& config);

// Leaf proportions of forest.trees[tree] for row `row` of data.
const std::vector<double>& tree_leaf(const Forest& forest, std::size_t tree, const Dataset& data, std::size_t row);

// Mean of leaf proportions over all trees. Throws on NaN features.
std::vector<double> predict_proba(const Forest& forest, const Dataset& data, std::size_t row);
// row holds one value per forest feature (level index for categorical).
std::vector<double> predict_proba(const Forest& forest, std::span<const double> row);

struct Prediction {
  std::size_t label = 0;  // argmax; ties go to the smallest class name
  std::vector<double> probabilities;
};
Prediction predict(const Forest& forest, const Dataset& data, std::size_t row);
std::size_t argmax_class(std::span<const double> probabilities);

// Encodes a table with the forest's features, levels and class names. An
// outcome column is optional; unknown levels or classes are errors.
Dataset encode_for_forest(const Forest& forest, const csv::Table& table,
                          const std::optional<std::string>& outcome);

}  // namespace promptsent
