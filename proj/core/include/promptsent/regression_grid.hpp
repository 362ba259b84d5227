#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptsent/csv.hpp"
#include "promptsent/stats.hpp"

namespace promptsent {

enum class SeRegime { hc0, cluster_a, cluster_b };
SeRegime parse_se_regime(std::string_view name);
std::string_view to_string(SeRegime regime) noexcept;

enum class Sample { full, complete };
Sample parse_sample(std::string_view name);
std::string_view to_string(Sample sample) noexcept;

struct ControlSet {
  std::string name;
  std::vector<std::string> continuous;
  std::vector<CategoricalTerm> categorical;
};

// Cartesian grid of linear-probability specifications, fitted once per
// sentiment measure (each measure has its own candidate-level table).
//
// JSON form:
//   {"measures": {"prompt": "aggregates.csv", ...},
//    "outcomes": ["placed_academic", ...],
//    "control_sets": [{"name": "base", "continuous": [...],
//                      "categorical": [{"column": "sex", "reference": "female"}]}],
//    "samples": ["full", "complete"],
//    "se_regimes": ["hc0", "cluster_a", "cluster_b"],
//    "clusters": {"cluster_a": "univ", "cluster_b": "rank_group*period"},
//    "regressors": ["avg_length_thousands", "avg_sentiment_pp"],
//    "dispersion": "sd_pp",
//    "focus": ["avg_sentiment_pp"],
//    "small_sample_correction": false}
// Relative measure paths resolve against the grid file's directory. When
// "dispersion" is set it is appended to the regressors, added to the focus
// terms, and the sample dimension is restricted to complete applications.
struct GridSpec {
  std::map<std::string, std::filesystem::path> measures;
  std::vector<std::string> outcomes;
  std::vector<ControlSet> control_sets;
  std::vector<Sample> samples = {Sample::full, Sample::complete};
  std::vector<SeRegime> se_regimes = {SeRegime::hc0, SeRegime::cluster_a, SeRegime::cluster_b};
  std::string cluster_a;
  std::string cluster_b;
  std::vector<std::string> regressors = {"avg_length_thousands", "avg_sentiment_pp"};
  std::optional<std::string> dispersion;
  std::vector<std::string> focus = {"avg_sentiment_pp"};
  bool small_sample_correction = false;
  // Column holding 1 for complete applications.
  std::string complete_column = "complete_application";

  std::size_t cells_per_measure() const noexcept;
};

GridSpec parse_grid_spec(std::string_view json_text, const std::filesystem::path& base_dir = {});
GridSpec load_grid_spec(const std::filesystem::path& path);

struct CoefficientRow {
  std::string term;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 0.0;
};

struct GridCell {
  std::string measure;
  std::string outcome;
  std::string control_set;
  Sample sample = Sample::full;
  SeRegime se_regime = SeRegime::hc0;
  std::size_t n = 0;
  std::size_t dropped = 0;
  double adj_r2 = 0.0;
  std::vector<CoefficientRow> coefficients;
  // Set when the fit failed; coefficients are then empty.
  std::optional<std::string> error;
};

// Cells ordered by measure, outcome, control set, sample, regime. Fits run
// in parallel; each fit is single threaded.
std::vector<GridCell> run_grid(const GridSpec& spec, const std::map<std::string, csv::Table>& tables,
                               unsigned jobs = 1);
// Loads the measure tables named by the spec.
std::vector<GridCell> run_grid(const GridSpec& spec, unsigned jobs = 1);

struct PValueSummary {
  std::string measure;
  std::string term;
  std::size_t n_cells = 0;
  std::size_t n_failed = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// One distribution per (measure, focus term), in grid order.
std::vector<PValueSummary> summarize_pvalues(const GridSpec& spec, const std::vector<GridCell>& cells);

// measure,outcome,control_set,sample,se_regime,term,estimate,se,z,p_value,n,dropped,adj_r2,status,error
void write_coefficients_csv(const std::vector<GridCell>& cells, std::ostream& out);
// Focus-term rows only: measure,outcome,control_set,sample,se_regime,term,p_value
void write_pvalues_csv(const GridSpec& spec, const std::vector<GridCell>& cells, std::ostream& out);
// measure,term,n_cells,n_failed,min,q1,median,q3,max
void write_summary_csv(const std::vector<PValueSummary>& summary, std::ostream& out);

}  // namespace promptsent
