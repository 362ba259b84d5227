#include "promptsent/regression_grid.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "promptsent/aggregate.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/parallel.hpp"

namespace promptsent {

using nlohmann::json;

SeRegime parse_se_regime(std::string_view name) {
  if (name == "hc0") return SeRegime::hc0;
  if (name == "cluster_a") return SeRegime::cluster_a;
  if (name == "cluster_b") return SeRegime::cluster_b;
  throw InvalidArgument("unknown standard-error regime '" + std::string(name) + "'");
}

std::string_view to_string(SeRegime regime) noexcept {
  switch (regime) {
    case SeRegime::hc0: return "hc0";
    case SeRegime::cluster_a: return "cluster_a";
    case SeRegime::cluster_b: return "cluster_b";
  }
  return "hc0";
}

Sample parse_sample(std::string_view name) {
  if (name == "full") return Sample::full;
  if (name == "complete") return Sample::complete;
  throw InvalidArgument("unknown sample '" + std::string(name) + "'");
}

std::string_view to_string(Sample sample) noexcept {
  return sample == Sample::full ? "full" : "complete";
}

std::size_t GridSpec::cells_per_measure() const noexcept {
  return outcomes.size() * control_sets.size() * samples.size() * se_regimes.size();
}

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.is_array()) throw ParseError(std::string("'") + key + "' must be an array of strings", 0);
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(std::string("'") + key + "' must be an array of strings", 0);
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

GridSpec parse_grid_spec(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("grid spec: ") + e.what(), 0);
  }
  if (!j.is_object()) throw ParseError("grid spec must be a JSON object", 0);

  GridSpec g;
  try {
    if (!j.contains("measures") || !j["measures"].is_object() || j["measures"].empty())
      throw ParseError("grid spec needs a non-empty 'measures' object", 0);
    for (const auto& [name, path] : j["measures"].items()) {
      std::filesystem::path p = path.get<std::string>();
      g.measures[name] = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (!j.contains("outcomes")) throw ParseError("grid spec needs 'outcomes'", 0);
    g.outcomes = string_list(j["outcomes"], "outcomes");
    if (j.contains("control_sets")) {
      for (const auto& cs : j["control_sets"]) {
        ControlSet set;
        set.name = cs.at("name").get<std::string>();
        if (cs.contains("continuous")) set.continuous = string_list(cs["continuous"], "continuous");
        if (cs.contains("categorical")) {
          for (const auto& c : cs["categorical"]) {
            CategoricalTerm t;
            if (c.is_string()) {
              t.column = c.get<std::string>();
            } else {
              t.column = c.at("column").get<std::string>();
              if (c.contains("reference")) t.reference = c["reference"].get<std::string>();
            }
            set.categorical.push_back(std::move(t));
          }
        }
        g.control_sets.push_back(std::move(set));
      }
    } else {
      g.control_sets.push_back({"none", {}, {}});
    }
    if (j.contains("samples")) {
      g.samples.clear();
      for (const auto& s : string_list(j["samples"], "samples")) g.samples.push_back(parse_sample(s));
    }
    if (j.contains("se_regimes")) {
      g.se_regimes.clear();
      for (const auto& s : string_list(j["se_regimes"], "se_regimes")) g.se_regimes.push_back(parse_se_regime(s));
    }
    if (j.contains("clusters")) {
      const auto& c = j["clusters"];
      if (c.contains("cluster_a")) g.cluster_a = c["cluster_a"].get<std::string>();
      if (c.contains("cluster_b")) g.cluster_b = c["cluster_b"].get<std::string>();
    }
    if (j.contains("regressors")) g.regressors = string_list(j["regressors"], "regressors");
    if (j.contains("focus")) g.focus = string_list(j["focus"], "focus");
    if (j.contains("small_sample_correction")) g.small_sample_correction = j["small_sample_correction"].get<bool>();
    if (j.contains("complete_column")) g.complete_column = j["complete_column"].get<std::string>();
    if (j.contains("dispersion") && !j["dispersion"].is_null()) {
      g.dispersion = j["dispersion"].get<std::string>();
      g.regressors.push_back(*g.dispersion);
      if (std::find(g.focus.begin(), g.focus.end(), *g.dispersion) == g.focus.end())
        g.focus.push_back(*g.dispersion);
      g.samples = {Sample::complete};
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid spec: ") + e.what(), 0);
  }

  if (g.outcomes.empty() || g.control_sets.empty() || g.samples.empty() || g.se_regimes.empty())
    throw InvalidArgument("grid spec has an empty dimension");
  for (auto r : g.se_regimes) {
    if (r == SeRegime::cluster_a && g.cluster_a.empty())
      throw InvalidArgument("regime cluster_a requested but clusters.cluster_a is not set");
    if (r == SeRegime::cluster_b && g.cluster_b.empty())
      throw InvalidArgument("regime cluster_b requested but clusters.cluster_b is not set");
  }
  return g;
}

GridSpec load_grid_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open grid spec '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid_spec(ss.str(), path.parent_path());
}

namespace {

csv::Table restrict_complete(const csv::Table& t, const std::string& column) {
  const auto c = t.require_column(column);
  std::vector<csv::Record> kept;
  for (const auto& r : t.rows())
    if (parse_flag(r.fields[c])) kept.push_back(r);
  return csv::Table::from_rows(t.header(), std::move(kept));
}

struct FitTask {
  std::string measure;
  const csv::Table* table;
  std::string outcome;
  const ControlSet* controls;
  Sample sample;
};

}  // namespace

std::vector<GridCell> run_grid(const GridSpec& spec, const std::map<std::string, csv::Table>& tables,
                               unsigned jobs) {
  std::map<std::string, csv::Table> complete;
  std::vector<FitTask> tasks;
  for (const auto& [measure, path] : spec.measures) {
    const auto it = tables.find(measure);
    if (it == tables.end()) throw InvalidArgument("no table for measure '" + measure + "'");
    for (auto s : spec.samples)
      if (s == Sample::complete && !complete.count(measure))
        complete.emplace(measure, restrict_complete(it->second, spec.complete_column));
    for (const auto& outcome : spec.outcomes)
      for (const auto& cs : spec.control_sets)
        for (auto s : spec.samples)
          tasks.push_back({measure, s == Sample::full ? &it->second : &complete.at(measure), outcome, &cs, s});
  }

  const auto per_fit = spec.se_regimes.size();
  std::vector<GridCell> cells(tasks.size() * per_fit);
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const auto& task = tasks[t];
    ModelSpec m;
    m.outcome = task.outcome;
    m.continuous = spec.regressors;
    m.continuous.insert(m.continuous.end(), task.controls->continuous.begin(), task.controls->continuous.end());
    m.categorical = task.controls->categorical;
    m.cluster_small_sample = spec.small_sample_correction;
    std::map<SeRegime, std::size_t> cluster_slot;
    for (auto r : spec.se_regimes) {
      if (r == SeRegime::hc0 || cluster_slot.count(r)) continue;
      cluster_slot[r] = m.cluster_columns.size();
      m.cluster_columns.push_back(r == SeRegime::cluster_a ? spec.cluster_a : spec.cluster_b);
    }

    std::optional<RegressionFit> fit;
    std::optional<std::string> error;
    try {
      fit = fit_model(*task.table, m);
    } catch (const Error& e) {
      error = std::string(e.kind()) + ": " + e.what();
    }

    for (std::size_t r = 0; r < per_fit; ++r) {
      auto& cell = cells[t * per_fit + r];
      cell.measure = task.measure;
      cell.outcome = task.outcome;
      cell.control_set = task.controls->name;
      cell.sample = task.sample;
      cell.se_regime = spec.se_regimes[r];
      if (!fit) {
        cell.error = error;
        continue;
      }
      cell.n = fit->n;
      cell.dropped = fit->dropped;
      cell.adj_r2 = fit->adj_r2;
      const auto& se = cell.se_regime == SeRegime::hc0 ? fit->se_hc0 : fit->se_cluster[cluster_slot.at(cell.se_regime)];
      for (std::size_t c = 0; c < fit->columns.size(); ++c) {
        CoefficientRow row;
        row.term = fit->columns[c];
        row.estimate = fit->coefficients(static_cast<Eigen::Index>(c));
        row.se = se(static_cast<Eigen::Index>(c));
        row.z = row.se > 0.0 ? row.estimate / row.se : std::numeric_limits<double>::quiet_NaN();
        row.p_value = normal_p_value(row.z);
        cell.coefficients.push_back(std::move(row));
      }
    }
  });
  return cells;
}

std::vector<GridCell> run_grid(const GridSpec& spec, unsigned jobs) {
  std::map<std::string, csv::Table> tables;
  for (const auto& [measure, path] : spec.measures) tables.emplace(measure, csv::Table::read_file(path.string()));
  return run_grid(spec, tables, jobs);
}

std::vector<PValueSummary> summarize_pvalues(const GridSpec& spec, const std::vector<GridCell>& cells) {
  std::vector<PValueSummary> out;
  for (const auto& [measure, path] : spec.measures) {
    for (const auto& term : spec.focus) {
      PValueSummary s;
      s.measure = measure;
      s.term = term;
      std::vector<double> ps;
      for (const auto& c : cells) {
        if (c.measure != measure) continue;
        ++s.n_cells;
        const CoefficientRow* row = nullptr;
        for (const auto& r : c.coefficients)
          if (r.term == term) row = &r;
        if (!row || std::isnan(row->p_value)) {
          ++s.n_failed;
          continue;
        }
        ps.push_back(row->p_value);
      }
      if (ps.empty()) {
        s.min = s.q1 = s.median = s.q3 = s.max = std::numeric_limits<double>::quiet_NaN();
      } else {
        s.min = quantile(ps, 0.0);
        s.q1 = quantile(ps, 0.25);
        s.median = quantile(ps, 0.5);
        s.q3 = quantile(ps, 0.75);
        s.max = quantile(ps, 1.0);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_coefficients_csv(const std::vector<GridCell>& cells, std::ostream& out) {
  csv::Writer w(out);
  w.row({"measure", "outcome", "control_set", "sample", "se_regime", "term", "estimate", "se", "z", "p_value",
         "n", "dropped", "adj_r2", "status", "error"});
  for (const auto& c : cells) {
    const std::vector<std::string> key = {c.measure, c.outcome, c.control_set, std::string(to_string(c.sample)),
                                          std::string(to_string(c.se_regime))};
    if (c.error) {
      auto row = key;
      for (int i = 0; i < 8; ++i) row.emplace_back(csv::kMissing);
      row.insert(row.end(), {"error", *c.error});
      w.row(row);
      continue;
    }
    for (const auto& r : c.coefficients) {
      auto row = key;
      row.insert(row.end(), {r.term, csv::format_double(r.estimate), csv::format_double(r.se),
                             csv::format_double(r.z), csv::format_double(r.p_value), std::to_string(c.n),
                             std::to_string(c.dropped), csv::format_double(c.adj_r2), "ok", ""});
      w.row(row);
    }
  }
}

void write_pvalues_csv(const GridSpec& spec, const std::vector<GridCell>& cells, std::ostream& out) {
  csv::Writer w(out);
  w.row({"measure", "outcome", "control_set", "sample", "se_regime", "term", "p_value"});
  for (const auto& c : cells) {
    for (const auto& term : spec.focus) {
      std::string p(csv::kMissing);
      for (const auto& r : c.coefficients)
        if (r.term == term) p = csv::format_double(r.p_value);
      w.row({c.measure, c.outcome, c.control_set, std::string(to_string(c.sample)),
             std::string(to_string(c.se_regime)), term, p});
    }
  }
}

void write_summary_csv(const std::vector<PValueSummary>& summary, std::ostream& out) {
  csv::Writer w(out);
  w.row({"measure", "term", "n_cells", "n_failed", "min", "q1", "median", "q3", "max"});
  for (const auto& s : summary)
    w.row({s.measure, s.term, std::to_string(s.n_cells), std::to_string(s.n_failed), csv::format_double(s.min),
           csv::format_double(s.q1), csv::format_double(s.median), csv::format_double(s.q3),
           csv::format_double(s.max)});
}

}  // namespace promptsent
