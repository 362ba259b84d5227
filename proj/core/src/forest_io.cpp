#include "promptsent/forest_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "promptsent/errors.hpp"

namespace promptsent {

using ojson = nlohmann::ordered_json;

std::string serialize_forest(const Forest& forest) {
  ojson j;
  j["format"] = kForestFormat;
  j["version"] = kForestFormatVersion;
  const auto& c = forest.config;
  j["config"] = {
      {"max_depth", c.max_depth},
      {"min_split", c.min_split},
      {"min_leaf", c.min_leaf},
      {"n_trees", c.n_trees},
      {"features_per_split", c.mtry(forest.features.size())},
      {"seed", std::to_string(c.seed)},
      {"class_weighting", to_string(c.class_weighting)},
  };
  j["features"] = ojson::array();
  for (const auto& f : forest.features)
    j["features"].push_back({{"name", f.name}, {"kind", to_string(f.kind)}, {"levels", f.levels}});
  j["classes"] = forest.class_names;
  j["n_train"] = forest.n_train;
  j["trees"] = ojson::array();
  for (const auto& t : forest.trees) {
    ojson tree;
    tree["in_bag"] = t.in_bag;
    tree["nodes"] = ojson::array();
    for (const auto& n : t.nodes) {
      ojson node;
      node["n"] = n.n_samples;
      if (!n.is_leaf()) {
        const auto& info = forest.features.at(static_cast<std::size_t>(n.feature));
        node["feature"] = n.feature;
        if (info.kind == FeatureKind::continuous) {
          node["threshold"] = n.threshold;
        } else {
          ojson levels = ojson::array();
          for (std::size_t l = 0; l < info.levels.size(); ++l)
            if ((n.left_levels >> l) & 1u) levels.push_back(info.levels[l]);
          node["left_levels"] = levels;
        }
        node["left"] = n.left;
        node["right"] = n.right;
      }
      node["proportions"] = n.proportions;
      tree["nodes"].push_back(std::move(node));
    }
    j["trees"].push_back(std::move(tree));
  }
  return j.dump() + "\n";
}

Forest deserialize_forest(std::string_view json_text) {
  try {
    const auto j = ojson::parse(json_text);
    if (j.at("format").get<std::string>() != kForestFormat) throw ParseError("not a serialized forest", 0);
    if (j.at("version").get<int>() != kForestFormatVersion)
      throw ParseError("unsupported forest format version " + std::to_string(j.at("version").get<int>()), 0);
    Forest f;
    const auto& c = j.at("config");
    f.config.max_depth = c.at("max_depth").get<std::size_t>();
    f.config.min_split = c.at("min_split").get<std::size_t>();
    f.config.min_leaf = c.at("min_leaf").get<std::size_t>();
    f.config.n_trees = c.at("n_trees").get<std::size_t>();
    f.config.features_per_split = c.at("features_per_split").get<std::size_t>();
    f.config.seed = std::stoull(c.at("seed").get<std::string>());
    f.config.class_weighting = parse_class_weighting(c.at("class_weighting").get<std::string>());
    for (const auto& fj : j.at("features"))
      f.features.push_back({fj.at("name").get<std::string>(), parse_feature_kind(fj.at("kind").get<std::string>()),
                            fj.at("levels").get<std::vector<std::string>>()});
    f.class_names = j.at("classes").get<std::vector<std::string>>();
    f.n_train = j.at("n_train").get<std::size_t>();
    for (const auto& tj : j.at("trees")) {
      Tree t;
      t.in_bag = tj.at("in_bag").get<std::vector<std::uint32_t>>();
      for (const auto& nj : tj.at("nodes")) {
        TreeNode n;
        n.n_samples = nj.at("n").get<std::uint32_t>();
        n.proportions = nj.at("proportions").get<std::vector<double>>();
        if (n.proportions.size() != f.class_names.size()) throw ParseError("node proportions do not match classes", 0);
        if (nj.contains("feature")) {
          n.feature = nj.at("feature").get<std::int32_t>();
          if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= f.features.size())
            throw ParseError("node feature index out of range", 0);
          const auto& info = f.features[static_cast<std::size_t>(n.feature)];
          if (info.kind == FeatureKind::continuous) {
            n.threshold = nj.at("threshold").get<double>();
          } else {
            for (const auto& name : nj.at("left_levels").get<std::vector<std::string>>()) {
              const auto it = std::find(info.levels.begin(), info.levels.end(), name);
              if (it == info.levels.end()) throw ParseError("unknown level '" + name + "' in split", 0);
              n.left_levels |= std::uint64_t{1} << (it - info.levels.begin());
            }
          }
          n.left = nj.at("left").get<std::uint32_t>();
          n.right = nj.at("right").get<std::uint32_t>();
        }
        t.nodes.push_back(std::move(n));
      }
      for (const auto& n : t.nodes)
        if (!n.is_leaf() && (n.left >= t.nodes.size() || n.right >= t.nodes.size()))
          throw ParseError("node child index out of range", 0);
      if (t.nodes.empty()) throw ParseError("tree without nodes", 0);
      f.trees.push_back(std::move(t));
    }
    if (f.trees.size() != f.config.n_trees) throw ParseError("tree count does not match config", 0);
    return f;
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("forest file: ") + e.what(), 0);
  }
}

void save_forest(const Forest& forest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << serialize_forest(forest);
}

Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_forest(ss.str());
}

}  // namespace promptsent
