#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "promptsent/forest.hpp"

namespace promptsent {

inline constexpr std::string_view kForestFormat = "promptsent-forest";
inline constexpr int kForestFormatVersion = 1;

// Self-describing JSON dump:
//   {"format": "promptsent-forest", "version": 1,
//    "config": {max_depth, min_split, min_leaf, n_trees, features_per_split,
//               seed (decimal string), class_weighting},
//    "features": [{"name", "kind", "levels"}], "classes": [...],
//    "n_train": n,
//    "trees": [{"in_bag": [...], "nodes": [node, ...]}]}
// A leaf node is {"n", "proportions"}; a split node adds "feature", "left",
// "right" and either "threshold" (continuous) or "left_levels" (level
// names, categorical). Output is byte-identical for equal forests.
std::string serialize_forest(const Forest& forest);
Forest deserialize_forest(std::string_view json_text);

void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace promptsent
