#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptsent/evalmeta.hpp"
#include "promptsent/forest.hpp"

namespace promptsent {

// Per-row OOB probabilities: the mean over trees whose bootstrap sample
// excludes the row. nullopt when every tree drew the row. data must be the
// training set (same row order).
std::vector<std::optional<std::vector<double>>> oob_probabilities(const Forest& forest, const Dataset& data);

struct OobResult {
  ClassificationReport report;
  double accuracy = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;  // rows never out of bag
};

// Throws when no row is out of bag for any tree.
OobResult oob_report(const Forest& forest, const Dataset& data);
double oob_accuracy(const Forest& forest, const Dataset& data);

enum class ImportanceMode { shuffle_only, shuffle_and_refit };
ImportanceMode parse_importance_mode(std::string_view name);
std::string_view to_string(ImportanceMode mode) noexcept;

// Baseline OOB accuracy minus the OOB accuracy after permuting the feature
// column, once per repeat. Permutations are seeded from (seed, feature,
// repeat). shuffle_and_refit refits the forest on the permuted data with the
// forest's own config.
std::vector<double> permutation_importance(const Forest& forest, const Dataset& data, std::size_t feature,
                                           std::size_t repeats = 30,
                                           ImportanceMode mode = ImportanceMode::shuffle_only,
                                           std::uint64_t seed = 0);

// Ten type-7 quantiles at p = 0.05, 0.15, ..., 0.95 (one point inside each
// decile band).
std::vector<double> decile_grid(std::span<const double> values);

enum class PdShape { curve, contour, table };
std::string_view to_string(PdShape shape) noexcept;

struct PdResult {
  std::vector<std::string> features;
  PdShape shape = PdShape::curve;
  // Grid per feature; categorical grids hold level indices.
  std::vector<std::vector<double>> grids;
  // Row-major over the grids: value[i * grids[1].size() + j].
  std::vector<double> values;
  std::vector<std::string> warnings;
};

// Average predicted probability of class `positive_class` when the feature(s)
// are set to each grid point for all rows. One or two features.
PdResult partial_dependence(const Forest& forest, const Dataset& data, std::span<const std::size_t> features,
                            const std::vector<std::vector<double>>& grids, std::size_t positive_class);

// Decile grid for continuous features, every level for categorical ones.
std::vector<double> default_pd_grid(const Dataset& data, std::size_t feature);

// Columns: one per feature (level names for categorical), then probability.
void write_pd_csv(const PdResult& pd, const Forest& forest, std::ostream& out);

}  // namespace promptsent
