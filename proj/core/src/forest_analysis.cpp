#include "promptsent/forest_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "promptsent/csv.hpp"
#include "promptsent/digest.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/parallel.hpp"
#include "promptsent/stats.hpp"

namespace promptsent {

std::vector<std::optional<std::vector<double>>> oob_probabilities(const Forest& forest, const Dataset& data) {
  const std::size_t n = data.size();
  if (n != forest.n_train)
    throw InvalidArgument("OOB evaluation needs the training rows (" + std::to_string(forest.n_train) +
                          "), got " + std::to_string(n));
  const std::size_t k = forest.class_names.size();
  std::vector<std::vector<double>> sums(n, std::vector<double>(k, 0.0));
  std::vector<std::size_t> votes(n, 0);
  std::vector<char> in_bag(n);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (auto i : forest.trees[t].in_bag) in_bag[i] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      const auto& leaf = tree_leaf(forest, t, data, i);
      for (std::size_t c = 0; c < k; ++c) sums[i][c] += leaf[c];
      ++votes[i];
    }
  }
  std::vector<std::optional<std::vector<double>>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!votes[i]) continue;
    for (auto& v : sums[i]) v /= static_cast<double>(votes[i]);
    out[i] = std::move(sums[i]);
  }
  return out;
}

OobResult oob_report(const Forest& forest, const Dataset& data) {
  if (data.labels.size() != data.size()) throw InvalidArgument("OOB evaluation needs labels");
  const auto probs = oob_probabilities(forest, data);
  std::vector<std::string> predicted, gold;
  OobResult r;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i]) {
      ++r.excluded;
      continue;
    }
    predicted.push_back(forest.class_names[argmax_class(*probs[i])]);
    gold.push_back(forest.class_names[data.labels[i]]);
  }
  if (gold.empty()) throw InvalidArgument("no row is out of bag for any tree");
  r.evaluated = gold.size();
  r.report = report(confusion(predicted, gold, forest.class_names));
  r.accuracy = r.report.accuracy;
  return r;
}

double oob_accuracy(const Forest& forest, const Dataset& data) {
  return oob_report(forest, data).accuracy;
}

ImportanceMode parse_importance_mode(std::string_view name) {
  if (name == "shuffle_only") return ImportanceMode::shuffle_only;
  if (name == "shuffle_and_refit") return ImportanceMode::shuffle_and_refit;
  throw InvalidArgument("unknown importance mode '" + std::string(name) + "'");
}

std::string_view to_string(ImportanceMode mode) noexcept {
  return mode == ImportanceMode::shuffle_only ? "shuffle_only" : "shuffle_and_refit";
}

std::vector<double> permutation_importance(const Forest& forest, const Dataset& data, std::size_t feature,
                                           std::size_t repeats, ImportanceMode mode, std::uint64_t seed) {
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (feature >= data.features.size())
    throw InvalidArgument("unknown feature index " + std::to_string(feature));
  const double baseline = oob_accuracy(forest, data);
  std::vector<double> out;
  out.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    Dataset permuted = data;
    std::mt19937_64 rng(derive_seed(seed, "permute", {feature, r}));
    auto& values = permuted.features[feature].values;
    stable_shuffle(values.begin(), values.end(), rng);
    double acc;
    if (mode == ImportanceMode::shuffle_only) {
      acc = oob_accuracy(forest, permuted);
    } else {
      acc = oob_accuracy(fit_forest(permuted, forest.config), permuted);
    }
    out.push_back(baseline - acc);
  }
  return out;
}

std::vector<double> decile_grid(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("decile grid of an empty column");
  std::vector<double> v(values.begin(), values.end());
  std::vector<double> grid;
  for (int d = 0; d < 10; ++d) grid.push_back(quantile(v, 0.05 + 0.1 * d));
  return grid;
}

std::string_view to_string(PdShape shape) noexcept {
  switch (shape) {
    case PdShape::curve: return "curve";
    case PdShape::contour: return "contour";
    case PdShape::table: return "table";
  }
  return "curve";
}

std::vector<double> default_pd_grid(const Dataset& data, std::size_t feature) {
  const auto& col = data.features.at(feature);
  if (col.kind == FeatureKind::continuous) return decile_grid(col.values);
  std::vector<double> g(col.levels.size());
  std::iota(g.begin(), g.end(), 0.0);
  return g;
}

PdResult partial_dependence(const Forest& forest, const Dataset& data, std::span<const std::size_t> features,
                            const std::vector<std::vector<double>>& grids, std::size_t positive_class) {
  if (features.empty() || features.size() > 2)
    throw UnsupportedCapabilityError("partial dependence supports one or two features");
  if (grids.size() != features.size()) throw InvalidArgument("one grid per feature is required");
  if (positive_class >= forest.class_names.size()) throw InvalidArgument("positive class out of range");
  if (data.features.size() != forest.features.size()) throw InvalidArgument("dataset features do not match the forest");
  if (features.size() == 2 && features[0] == features[1]) throw InvalidArgument("partial dependence features must differ");
  const std::size_t n = data.size();
  if (n == 0) throw InvalidArgument("partial dependence needs at least one row");

  PdResult pd;
  pd.grids = grids;
  bool any_categorical = false;
  for (std::size_t a = 0; a < features.size(); ++a) {
    const auto f = features[a];
    if (f >= data.features.size()) throw InvalidArgument("unknown feature index " + std::to_string(f));
    const auto& col = data.features[f];
    pd.features.push_back(col.name);
    if (grids[a].empty()) throw InvalidArgument("empty grid for '" + col.name + "'");
    if (col.kind == FeatureKind::categorical) {
      any_categorical = true;
      for (double g : grids[a])
        if (g < 0 || g >= static_cast<double>(col.levels.size()) || g != std::floor(g))
          throw InvalidArgument("grid value is not a level of '" + col.name + "'");
    } else {
      const auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
      for (double g : grids[a])
        if (g < *lo || g > *hi)
          pd.warnings.push_back("grid value " + csv::format_double(g) + " of '" + col.name +
                                "' lies outside the observed support");
    }
  }
  pd.shape = features.size() == 1 ? PdShape::curve : any_categorical ? PdShape::table : PdShape::contour;

  const std::size_t g0 = grids[0].size();
  const std::size_t g1 = features.size() == 2 ? grids[1].size() : 1;
  pd.values.assign(g0 * g1, 0.0);
  const std::size_t p = data.features.size();
  parallel_for(g0 * g1, forest.config.jobs, [&](std::size_t cell) {
    std::vector<double> row(p);
    // Running mean: a forest that predicts one value everywhere returns it
    // unchanged.
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < p; ++f) row[f] = data.features[f].values[i];
      row[features[0]] = grids[0][cell / g1];
      if (features.size() == 2) row[features[1]] = grids[1][cell % g1];
      mean += (predict_proba(forest, row)[positive_class] - mean) / static_cast<double>(i + 1);
    }
    pd.values[cell] = mean;
  });
  return pd;
}

void write_pd_csv(const PdResult& pd, const Forest& forest, std::ostream& out) {
  csv::Writer w(out);
  std::vector<std::string> header = pd.features;
  header.push_back("probability");
  w.row(header);
  auto cell_text = [&](std::size_t axis, double v) {
    const auto& info = forest.features[forest.feature_index(pd.features[axis])];
    return info.kind == FeatureKind::categorical ? info.levels[static_cast<std::size_t>(v)] : csv::format_double(v);
  };
  const std::size_t g1 = pd.grids.size() == 2 ? pd.grids[1].size() : 1;
  for (std::size_t cell = 0; cell < pd.values.size(); ++cell) {
    std::vector<std::string> row = {cell_text(0, pd.grids[0][cell / g1])};
    if (pd.grids.size() == 2) row.push_back(cell_text(1, pd.grids[1][cell % g1]));
    row.push_back(csv::format_double(pd.values[cell]));
    w.row(row);
  }
}

}  // namespace promptsent
