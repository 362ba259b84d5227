#include "promptsent/forest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "promptsent/digest.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/parallel.hpp"

namespace promptsent {

FeatureKind parse_feature_kind(std::string_view name) {
  if (name == "continuous") return FeatureKind::continuous;
  if (name == "categorical") return FeatureKind::categorical;
  throw InvalidArgument("unknown feature kind '" + std::string(name) + "'");
}

std::string_view to_string(FeatureKind kind) noexcept {
  return kind == FeatureKind::continuous ? "continuous" : "categorical";
}

ClassWeighting parse_class_weighting(std::string_view name) {
  if (name == "none") return ClassWeighting::none;
  if (name == "inverse_probability") return ClassWeighting::inverse_probability;
  throw InvalidArgument("unknown class weighting '" + std::string(name) + "'");
}

std::string_view to_string(ClassWeighting w) noexcept {
  return w == ClassWeighting::none ? "none" : "inverse_probability";
}

std::size_t Dataset::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

std::size_t Forest::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].name == name) return i;
  throw InvalidArgument("unknown feature '" + std::string(name) + "'");
}

namespace {

bool missing_cell(const std::string& v) { return v.empty() || v == csv::kMissing; }

}  // namespace

Dataset make_dataset(const csv::Table& table, const std::string& outcome,
                     const std::vector<std::string>& features,
                     const std::vector<std::string>& categorical) {
  if (features.empty()) throw InvalidArgument("forest needs at least one feature");
  const std::set<std::string> cat_set(categorical.begin(), categorical.end());
  for (const auto& c : categorical)
    if (std::find(features.begin(), features.end(), c) == features.end())
      throw InvalidArgument("categorical column '" + c + "' is not a feature");
  const auto y_col = table.require_column(outcome);
  std::vector<std::size_t> cols;
  for (const auto& f : features) {
    if (f == outcome) throw InvalidArgument("outcome '" + f + "' also listed as feature");
    cols.push_back(table.require_column(f));
  }

  std::vector<const csv::Record*> kept;
  Dataset d;
  for (const auto& r : table.rows()) {
    bool ok = !missing_cell(r.fields[y_col]);
    for (std::size_t j = 0; j < features.size() && ok; ++j) {
      const auto& v = r.fields[cols[j]];
      ok = cat_set.count(features[j]) ? !missing_cell(v) : csv::parse_double(v).has_value();
    }
    if (ok) kept.push_back(&r);
    else ++d.dropped;
  }

  std::set<std::string> classes;
  for (const auto* r : kept) classes.insert(r->fields[y_col]);
  d.class_names.assign(classes.begin(), classes.end());
  for (const auto* r : kept)
    d.labels.push_back(static_cast<std::size_t>(
        std::lower_bound(d.class_names.begin(), d.class_names.end(), r->fields[y_col]) - d.class_names.begin()));

  for (std::size_t j = 0; j < features.size(); ++j) {
    FeatureColumn col;
    col.name = features[j];
    col.kind = cat_set.count(features[j]) ? FeatureKind::categorical : FeatureKind::continuous;
    if (col.kind == FeatureKind::categorical) {
      std::set<std::string> levels;
      for (const auto* r : kept) levels.insert(r->fields[cols[j]]);
      if (levels.size() > kMaxCategoricalLevels)
        throw InvalidArgument("categorical feature '" + col.name + "' has more than 64 levels");
      col.levels.assign(levels.begin(), levels.end());
      for (const auto* r : kept)
        col.values.push_back(static_cast<double>(
            std::lower_bound(col.levels.begin(), col.levels.end(), r->fields[cols[j]]) - col.levels.begin()));
    } else {
      for (const auto* r : kept) col.values.push_back(*csv::parse_double(r->fields[cols[j]]));
    }
    d.features.push_back(std::move(col));
  }
  return d;
}

std::size_t RFConfig::mtry(std::size_t n_features) const {
  if (features_per_split) return std::clamp<std::size_t>(*features_per_split, 1, std::max<std::size_t>(n_features, 1));
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(m, 1);
}

void RFConfig::validate() const {
  if (min_leaf < 1) throw InvalidArgument("min_leaf must be at least 1");
  if (min_split < 2) throw InvalidArgument("min_split must be at least 2");
  if (n_trees < 1) throw InvalidArgument("n_trees must be at least 1");
  if (features_per_split && *features_per_split < 1) throw InvalidArgument("features_per_split must be at least 1");
}

std::vector<double> inverse_probability_weights(std::span<const std::size_t> labels, std::size_t n_classes) {
  if (labels.empty()) throw InvalidArgument("no labels");
  std::vector<std::size_t> counts(n_classes, 0);
  for (auto l : labels) {
    if (l >= n_classes) throw InvalidArgument("label index out of range");
    ++counts[l];
  }
  for (std::size_t c = 0; c < n_classes; ++c)
    if (counts[c] == 0) throw InvalidArgument("class " + std::to_string(c) + " has no elements");
  const double n = static_cast<double>(labels.size());
  std::vector<double> w;
  w.reserve(labels.size());
  for (auto l : labels) w.push_back(n / (static_cast<double>(n_classes) * static_cast<double>(counts[l])));
  return w;
}

std::size_t Tree::depth() const {
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    const auto& n = nodes[i];
    return n.is_leaf() ? 0 : 1 + std::max(rec(n.left), rec(n.right));
  };
  return nodes.empty() ? 0 : rec(0);
}

namespace {

// Decreases at or below this fraction of the node weight count as no gain.
constexpr double kMinGain = 1e-12;

struct Split {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint64_t left_levels = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const RFConfig& cfg, const std::vector<double>& class_weight,
              std::mt19937_64& rng)
      : data_(data), cfg_(cfg), class_weight_(class_weight), rng_(rng), k_(data.class_names.size()) {}

  std::vector<TreeNode> build(std::vector<std::uint32_t> samples) {
    grow(std::move(samples), 0);
    return std::move(nodes_);
  }

 private:
  std::vector<double> totals(const std::vector<std::uint32_t>& s) const {
    std::vector<double> t(k_, 0.0);
    for (auto i : s) t[data_.labels[i]] += class_weight_[data_.labels[i]];
    return t;
  }

  static double sum_sq_over(const std::vector<double>& t, double w) {
    if (w <= 0.0) return 0.0;
    double s = 0.0;
    for (double v : t) s += v * v;
    return s / w;
  }

  std::uint32_t grow(std::vector<std::uint32_t> samples, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    const auto t = totals(samples);
    const double w = std::accumulate(t.begin(), t.end(), 0.0);
    {
      auto& node = nodes_[index];
      node.n_samples = static_cast<std::uint32_t>(samples.size());
      node.proportions.resize(k_);
      for (std::size_t c = 0; c < k_; ++c) node.proportions[c] = t[c] / w;
    }
    const bool pure = std::count_if(t.begin(), t.end(), [](double v) { return v > 0.0; }) <= 1;
    if (depth >= cfg_.max_depth || samples.size() < cfg_.min_split || pure) return index;

    const Split best = find_split(samples, t, w);
    if (best.feature < 0) return index;

    std::vector<std::uint32_t> left, right;
    for (auto i : samples) (goes_left(best, i) ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();
    nodes_[index].feature = best.feature;
    nodes_[index].threshold = best.threshold;
    nodes_[index].left_levels = best.left_levels;
    const auto l = grow(std::move(left), depth + 1);
    const auto r = grow(std::move(right), depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  bool goes_left(const Split& s, std::uint32_t i) const {
    const auto& col = data_.features[static_cast<std::size_t>(s.feature)];
    const double v = col.values[i];
    if (col.kind == FeatureKind::continuous) return v <= s.threshold;
    return (s.left_levels >> static_cast<unsigned>(v)) & 1u;
  }

  Split find_split(const std::vector<std::uint32_t>& samples, const std::vector<double>& t, double w) {
    const std::size_t p = data_.features.size();
    const std::size_t m = cfg_.mtry(p);
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < m; ++i) std::swap(order[i], order[i + uniform_below(rng_, p - i)]);
    order.resize(m);
    std::sort(order.begin(), order.end());

    const double parent = sum_sq_over(t, w);
    Split best;
    best.gain = kMinGain * w;
    for (auto f : order) {
      if (data_.features[f].kind == FeatureKind::continuous) scan_continuous(f, samples, t, w, parent, best);
      else scan_categorical(f, samples, t, w, parent, best);
    }
    return best;
  }

  void consider(double gain, std::size_t f, double threshold, std::uint64_t mask, Split& best) const {
    if (gain > best.gain) {
      best.gain = gain;
      best.feature = static_cast<std::int32_t>(f);
      best.threshold = threshold;
      best.left_levels = mask;
    }
  }

  void scan_continuous(std::size_t f, const std::vector<std::uint32_t>& samples, const std::vector<double>& t,
                       double w, double parent, Split& best) const {
    const auto& v = data_.features[f].values;
    std::vector<std::uint32_t> s = samples;
    std::sort(s.begin(), s.end(), [&](std::uint32_t a, std::uint32_t b) {
      return v[a] < v[b] || (v[a] == v[b] && a < b);
    });
    std::vector<double> lt(k_, 0.0), rt = t;
    double lw = 0.0;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = data_.labels[s[i]];
      const double cw = class_weight_[c];
      lt[c] += cw;
      rt[c] -= cw;
      lw += cw;
      if (!(v[s[i]] < v[s[i + 1]])) continue;
      if (i + 1 < cfg_.min_leaf || n - i - 1 < cfg_.min_leaf) continue;
      const double gain = sum_sq_over(lt, lw) + sum_sq_over(rt, w - lw) - parent;
      consider(gain, f, 0.5 * (v[s[i]] + v[s[i + 1]]), 0, best);
    }
  }

  void scan_categorical(std::size_t f, const std::vector<std::uint32_t>& samples, const std::vector<double>& t,
                        double w, double parent, Split& best) const {
    const auto& col = data_.features[f];
    const std::size_t n_levels = col.levels.size();
    std::vector<std::vector<double>> lt(n_levels, std::vector<double>(k_, 0.0));
    std::vector<std::size_t> counts(n_levels, 0);
    for (auto i : samples) {
      const auto l = static_cast<std::size_t>(col.values[i]);
      lt[l][data_.labels[i]] += class_weight_[data_.labels[i]];
      ++counts[l];
    }
    std::vector<std::size_t> present;
    for (std::size_t l = 0; l < n_levels; ++l)
      if (counts[l] > 0) present.push_back(l);
    if (present.size() < 2) return;

    auto evaluate = [&](const std::vector<std::size_t>& left_levels) {
      std::vector<double> left(k_, 0.0);
      std::size_t left_n = 0;
      std::uint64_t mask = 0;
      for (auto l : left_levels) {
        for (std::size_t c = 0; c < k_; ++c) left[c] += lt[l][c];
        left_n += counts[l];
        mask |= std::uint64_t{1} << l;
      }
      if (left_n < cfg_.min_leaf || samples.size() - left_n < cfg_.min_leaf) return;
      std::vector<double> right(k_);
      double lw = 0.0;
      for (std::size_t c = 0; c < k_; ++c) {
        right[c] = t[c] - left[c];
        lw += left[c];
      }
      const double gain = sum_sq_over(left, lw) + sum_sq_over(right, w - lw) - parent;
      consider(gain, f, 0.0, mask, best);
    };

    if (present.size() <= 8) {
      for (auto l : present) evaluate({l});
      return;
    }
    const std::size_t last = k_ - 1;
    std::vector<std::pair<double, std::size_t>> rated;
    for (auto l : present) {
      const double lw = std::accumulate(lt[l].begin(), lt[l].end(), 0.0);
      rated.emplace_back(lt[l][last] / lw, l);
    }
    std::sort(rated.begin(), rated.end());
    std::vector<std::size_t> prefix;
    for (std::size_t j = 0; j + 1 < rated.size(); ++j) {
      prefix.push_back(rated[j].second);
      evaluate(prefix);
    }
  }

  const Dataset& data_;
  const RFConfig& cfg_;
  const std::vector<double>& class_weight_;
  std::mt19937_64& rng_;
  std::size_t k_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

Forest fit_forest(const Dataset& data, const RFConfig& config) {
  config.validate();
  const std::size_t n = data.size();
  if (data.features.empty()) throw InvalidArgument("forest needs at least one feature");
  if (data.labels.size() != n) throw InvalidArgument("dataset labels and features differ in length");
  if (n < config.min_split)
    throw InvalidArgument("training set has " + std::to_string(n) + " rows, fewer than min_split");
  const std::size_t k = data.class_names.size();
  if (std::set<std::size_t>(data.labels.begin(), data.labels.end()).size() < 2)
    throw InvalidArgument("outcome is constant; nothing to classify");
  for (const auto& f : data.features) {
    for (double v : f.values)
      if (!std::isfinite(v)) throw InvalidArgument("feature '" + f.name + "' has a non-finite value");
  }

  std::vector<double> class_weight(k, 1.0);
  if (config.class_weighting == ClassWeighting::inverse_probability) {
    std::vector<std::size_t> counts(k, 0);
    for (auto l : data.labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) throw InvalidArgument("class '" + data.class_names[c] + "' has no elements");
      class_weight[c] = static_cast<double>(n) / (static_cast<double>(k) * static_cast<double>(counts[c]));
    }
  }

  Forest forest;
  forest.config = config;
  forest.class_names = data.class_names;
  forest.n_train = n;
  for (const auto& f : data.features) forest.features.push_back({f.name, f.kind, f.levels});
  forest.trees.resize(config.n_trees);

  parallel_for(config.n_trees, config.jobs, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(config.seed, "tree", {t}));
    std::vector<std::uint32_t> sample(n);
    for (auto& s : sample) s = static_cast<std::uint32_t>(uniform_below(rng, n));
    std::sort(sample.begin(), sample.end());
    TreeBuilder builder(data, config, class_weight, rng);
    forest.trees[t].in_bag = sample;
    forest.trees[t].nodes = builder.build(std::move(sample));
  });
  return forest;
}

namespace {

template <typename Value>
const std::vector<double>& descend(const Tree& tree, const std::vector<FeatureInfo>& features, Value&& value) {
  const TreeNode* node = &tree.nodes.front();
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature);
    const double v = value(f);
    bool left;
    if (features[f].kind == FeatureKind::continuous) {
      left = v <= node->threshold;
    } else {
      left = v >= 0 && v < 64 && ((node->left_levels >> static_cast<unsigned>(v)) & 1u);
    }
    node = &tree.nodes[left ? node->left : node->right];
  }
  return node->proportions;
}

}  // namespace

const std::vector<double>& tree_leaf(const Forest& forest, std::size_t tree, const Dataset& data, std::size_t row) {
  return descend(forest.trees[tree], forest.features, [&](std::size_t f) { return data.features[f].values[row]; });
}

std::vector<double> predict_proba(const Forest& forest, std::span<const double> row) {
  if (row.size() != forest.features.size())
    throw InvalidArgument("row has " + std::to_string(row.size()) + " values, forest expects " +
                          std::to_string(forest.features.size()));
  for (std::size_t f = 0; f < row.size(); ++f)
    if (std::isnan(row[f])) throw InvalidArgument("feature '" + forest.features[f].name + "' is missing");
  std::vector<double> p(forest.class_names.size(), 0.0);
  for (const auto& tree : forest.trees) {
    const auto& leaf = descend(tree, forest.features, [&](std::size_t f) { return row[f]; });
    for (std::size_t c = 0; c < p.size(); ++c) p[c] += leaf[c];
  }
  for (auto& v : p) v /= static_cast<double>(forest.trees.size());
  return p;
}

std::vector<double> predict_proba(const Forest& forest, const Dataset& data, std::size_t row) {
  if (data.features.size() != forest.features.size())
    throw InvalidArgument("dataset features do not match the forest");
  std::vector<double> values(data.features.size());
  for (std::size_t f = 0; f < values.size(); ++f) values[f] = data.features[f].values[row];
  return predict_proba(forest, values);
}

std::size_t argmax_class(std::span<const double> probabilities) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probabilities.size(); ++c)
    if (probabilities[c] > probabilities[best]) best = c;
  return best;
}

Prediction predict(const Forest& forest, const Dataset& data, std::size_t row) {
  Prediction p;
  p.probabilities = predict_proba(forest, data, row);
  p.label = argmax_class(p.probabilities);
  return p;
}

Dataset encode_for_forest(const Forest& forest, const csv::Table& table, const std::optional<std::string>& outcome) {
  Dataset d;
  d.class_names = forest.class_names;
  std::vector<std::size_t> cols;
  for (const auto& f : forest.features) cols.push_back(table.require_column(f.name));
  std::optional<std::size_t> y_col;
  if (outcome) y_col = table.require_column(*outcome);
  for (const auto& f : forest.features) d.features.push_back({f.name, f.kind, {}, f.levels});

  for (const auto& r : table.rows()) {
    bool ok = !y_col || !missing_cell(r.fields[*y_col]);
    for (std::size_t j = 0; j < cols.size() && ok; ++j) {
      const auto& v = r.fields[cols[j]];
      ok = forest.features[j].kind == FeatureKind::categorical ? !missing_cell(v) : csv::parse_double(v).has_value();
    }
    if (!ok) {
      ++d.dropped;
      continue;
    }
    if (y_col) {
      const auto& y = r.fields[*y_col];
      const auto it = std::find(d.class_names.begin(), d.class_names.end(), y);
      if (it == d.class_names.end()) throw InvalidArgument("outcome value '" + y + "' unknown to the forest");
      d.labels.push_back(static_cast<std::size_t>(it - d.class_names.begin()));
    }
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto& info = forest.features[j];
      const auto& v = r.fields[cols[j]];
      if (info.kind == FeatureKind::continuous) {
        d.features[j].values.push_back(*csv::parse_double(v));
      } else {
        const auto it = std::find(info.levels.begin(), info.levels.end(), v);
        if (it == info.levels.end())
          throw InvalidArgument("level '" + v + "' of feature '" + info.name + "' unknown to the forest");
        d.features[j].values.push_back(static_cast<double>(it - info.levels.begin()));
      }
    }
  }
  return d;
}

}  // namespace promptsent
