#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "promptsent/aggregate.hpp"
#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/regression_grid.hpp"

using namespace promptsent;

namespace {

// Candidate table built from the synthetic corpus with random letter scores.
csv::Table candidate_table(std::size_t n_candidates, std::uint64_t seed) {
  const auto corpus = gen::synthetic_corpus(n_candidates, seed);
  std::mt19937_64 rng(seed + 1);
  std::vector<LetterScore> letters;
  for (const auto& d : corpus) {
    LetterScore s;
    s.document_id = d.id;
    s.candidate_id = d.candidate_id;
    s.word_count = d.word_count;
    s.is_adviser = parse_flag(d.meta.at("is_adviser"));
    s.polarity = 0.2 * gen::normal(rng);
    s.meta = d.meta;
    s.meta.erase("is_adviser");
    letters.push_back(std::move(s));
  }
  std::ostringstream out;
  write_aggregates_csv(aggregate(letters), out);
  return csv::Table::parse(out.str());
}

const char* kSmallGrid = R"({
  "measures": {"prompt": "prompt.csv"},
  "outcomes": ["academic", "top_placement"],
  "control_sets": [{"name": "none"}],
  "samples": ["full"],
  "clusters": {"cluster_a": "univ", "cluster_b": "phd_rank*year"}
})";

}  // namespace

TEST(GridSpec, DefaultsAndRelativePaths) {
  const auto g = parse_grid_spec(kSmallGrid, "/data/grids");
  EXPECT_EQ(g.measures.at("prompt"), std::filesystem::path("/data/grids/prompt.csv"));
  EXPECT_EQ(g.se_regimes.size(), 3u);
  EXPECT_EQ(g.cells_per_measure(), 6u);
  EXPECT_EQ(g.focus, (std::vector<std::string>{"avg_sentiment_pp"}));
}

TEST(GridSpec, DispersionForcesCompleteSample) {
  const auto g = parse_grid_spec(R"({"measures": {"m": "a.csv"}, "outcomes": ["academic"],
    "se_regimes": ["hc0"], "dispersion": "sd_pp"})");
  EXPECT_EQ(g.samples, (std::vector<Sample>{Sample::complete}));
  EXPECT_EQ(g.regressors.back(), "sd_pp");
  EXPECT_EQ(g.regressors.size(), 3u);
  EXPECT_EQ(g.focus, (std::vector<std::string>{"avg_sentiment_pp", "sd_pp"}));
}

TEST(GridSpec, Errors) {
  EXPECT_THROW(parse_grid_spec("{"), ParseError);
  EXPECT_THROW(parse_grid_spec(R"({"outcomes": ["a"]})"), ParseError);
  EXPECT_THROW(parse_grid_spec(R"({"measures": {"m": "a.csv"}, "outcomes": ["a"]})"), InvalidArgument);
  EXPECT_THROW(parse_grid_spec(R"({"measures": {"m": "a.csv"}, "outcomes": ["a"], "se_regimes": ["hc1"]})"),
               InvalidArgument);
}

TEST(RunGrid, SixRowsPerCoefficient) {
  const auto spec = parse_grid_spec(kSmallGrid);
  const std::map<std::string, csv::Table> tables = {{"prompt", candidate_table(80, 3)}};
  const auto cells = run_grid(spec, tables, 2);
  ASSERT_EQ(cells.size(), 6u);
  for (const auto& c : cells) {
    ASSERT_FALSE(c.error) << *c.error;
    EXPECT_EQ(c.coefficients.size(), 3u);
  }
  // The three regimes share estimates and differ only in standard errors.
  EXPECT_EQ(cells[0].coefficients[2].estimate, cells[1].coefficients[2].estimate);
  EXPECT_NE(cells[0].coefficients[2].se, cells[1].coefficients[2].se);
  const auto& c = cells[0].coefficients[2];
  EXPECT_EQ(c.term, "avg_sentiment_pp");
  EXPECT_DOUBLE_EQ(c.z, c.estimate / c.se);
  EXPECT_DOUBLE_EQ(c.p_value, std::erfc(std::fabs(c.z) / std::sqrt(2.0)));

  std::ostringstream coef;
  write_coefficients_csv(cells, coef);
  const auto t = csv::Table::parse(coef.str());
  EXPECT_EQ(t.rows().size(), 18u);
  std::size_t sentiment_rows = 0;
  for (const auto& r : t.rows()) sentiment_rows += r.fields[t.require_column("term")] == "avg_sentiment_pp";
  EXPECT_EQ(sentiment_rows, 6u);
}

TEST(RunGrid, CompleteSampleAndControls) {
  auto spec = parse_grid_spec(R"({
    "measures": {"prompt": "x"}, "outcomes": ["academic"],
    "control_sets": [{"name": "none"}, {"name": "sex", "categorical": [{"column": "sex", "reference": "female"}]}],
    "samples": ["full", "complete"], "se_regimes": ["hc0"]})");
  const auto table = candidate_table(80, 4);
  const auto cells = run_grid(spec, {{"prompt", table}});
  ASSERT_EQ(cells.size(), 4u);
  const auto complete_col = table.require_column("complete_application");
  std::size_t n_complete = 0;
  for (const auto& r : table.rows()) n_complete += r.fields[complete_col] == "1";
  EXPECT_EQ(cells[0].n, 80u);
  EXPECT_EQ(cells[1].n, n_complete);
  EXPECT_LT(n_complete, 80u);
  EXPECT_EQ(cells[2].coefficients.back().term, "sex=male");
}

TEST(RunGrid, FailuresAreRecordedPerCell) {
  auto spec = parse_grid_spec(R"({"measures": {"m": "x"}, "outcomes": ["academic", "missing_outcome"],
    "samples": ["full"], "se_regimes": ["hc0"]})");
  const auto cells = run_grid(spec, {{"m", candidate_table(30, 5)}});
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_FALSE(cells[0].error);
  ASSERT_TRUE(cells[1].error);
  EXPECT_EQ(cells[1].error->rfind("invalid_argument", 0), 0u);
  const auto summary = summarize_pvalues(spec, cells);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].n_cells, 2u);
  EXPECT_EQ(summary[0].n_failed, 1u);
}

TEST(RunGrid, DeterministicAcrossJobCounts) {
  const auto spec = parse_grid_spec(kSmallGrid);
  const std::map<std::string, csv::Table> tables = {{"prompt", candidate_table(60, 9)}};
  std::ostringstream a, b;
  write_summary_csv(summarize_pvalues(spec, run_grid(spec, tables, 1)), a);
  write_summary_csv(summarize_pvalues(spec, run_grid(spec, tables, 4)), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Summary, QuartilesOfFocusPValues) {
  const auto spec = parse_grid_spec(kSmallGrid);
  const auto cells = run_grid(spec, {{"prompt", candidate_table(80, 3)}});
  std::vector<double> ps;
  for (const auto& c : cells) ps.push_back(c.coefficients[2].p_value);
  const auto s = summarize_pvalues(spec, cells);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].n_cells, 6u);
  EXPECT_EQ(s[0].median, quantile(ps, 0.5));
  EXPECT_EQ(s[0].min, *std::min_element(ps.begin(), ps.end()));
  std::ostringstream pv;
  write_pvalues_csv(spec, cells, pv);
  EXPECT_EQ(csv::Table::parse(pv.str()).rows().size(), 6u);
}
