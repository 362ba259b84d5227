#include <gtest/gtest.h>

#include <sstream>

#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"
#include "promptsent/evalmeta.hpp"

using namespace promptsent;

namespace {

std::vector<std::string> repeat(const std::string& label, std::size_t n) { return std::vector<std::string>(n, label); }

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(Confusion, PerfectIsDiagonal) {
  const std::vector<std::string> gold = {"a", "b", "c", "b"};
  const auto m = confusion(gold, gold);
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"a", "b", "c"}));
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(m.count(g, p), g == p ? (g == 1 ? 2u : 1u) : 0u);
  EXPECT_EQ(m.total(), 4u);
}

TEST(Confusion, SinglePredictedColumn) {
  const std::vector<std::string> gold = {"a", "b", "c"};
  const std::vector<std::string> pred = {"b", "b", "b"};
  const auto m = confusion(pred, gold);
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(m.count(g, p), p == 1 ? 1u : 0u);
}

TEST(Confusion, HandBuiltTwoByTwo) {
  // TP 2, FP 1, FN 1, TN 6 with "pos" as the positive class.
  const auto gold = concat(concat(concat(repeat("pos", 2), repeat("neg", 1)), repeat("pos", 1)), repeat("neg", 6));
  const auto pred = concat(concat(concat(repeat("pos", 2), repeat("pos", 1)), repeat("neg", 1)), repeat("neg", 6));
  const auto m = confusion(pred, gold);
  const auto pos = m.index_of("pos"), neg = m.index_of("neg");
  EXPECT_EQ(m.count(pos, pos), 2u);
  EXPECT_EQ(m.count(neg, pos), 1u);
  EXPECT_EQ(m.count(pos, neg), 1u);
  EXPECT_EQ(m.count(neg, neg), 6u);

  const auto rep = report(m);
  EXPECT_DOUBLE_EQ(rep.row("pos").precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.row("pos").recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.row("pos").f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(rep.accuracy, 0.8);
}

TEST(Confusion, Errors) {
  const std::vector<std::string> a = {"x"};
  const std::vector<std::string> b = {"x", "y"};
  EXPECT_THROW(confusion(a, b), InvalidArgument);
  EXPECT_THROW(confusion(std::vector<std::string>{}, std::vector<std::string>{}), InvalidArgument);
  EXPECT_THROW(confusion(b, b, {"x"}), MissingLabelError);
  EXPECT_THROW(ConfusionMatrix({"a", "a"}, {{1, 0}, {0, 1}}), InvalidArgument);
}

TEST(Report, PerfectOnSupports507And1461) {
  const auto gold = concat(repeat("Female", 507), repeat("Male", 1461));
  const auto rep = report(confusion(gold, gold));
  EXPECT_EQ(rep.total_support, 1968u);
  EXPECT_EQ(rep.accuracy, 1.0);
  for (const auto* r : {&rep.row("Female"), &rep.row("Male"), &rep.macro_avg, &rep.weighted_avg}) {
    EXPECT_EQ(r->precision, 1.0);
    EXPECT_EQ(r->recall, 1.0);
    EXPECT_EQ(r->f1, 1.0);
  }
  EXPECT_EQ(rep.row("Female").support, 507u);
  EXPECT_EQ(rep.row("Male").support, 1461u);
}

TEST(Report, ZeroSupportClass) {
  const std::vector<std::string> gold = {"a", "a", "b"};
  const std::vector<std::string> pred = {"a", "b", "b"};
  const auto rep = report(confusion(pred, gold, {"a", "b", "c"}));
  const auto& c = rep.row("c");
  EXPECT_EQ(c.support, 0u);
  EXPECT_EQ(c.precision, 0.0);
  EXPECT_EQ(c.recall, 0.0);
  EXPECT_TRUE(c.undefined);
  // Weighted average ignores the zero-support row.
  const double wp = (2.0 * rep.row("a").precision + 1.0 * rep.row("b").precision) / 3.0;
  EXPECT_DOUBLE_EQ(rep.weighted_avg.precision, wp);
  EXPECT_DOUBLE_EQ(rep.macro_avg.precision, (rep.row("a").precision + rep.row("b").precision) / 3.0);
}

TEST(Report, RenderLayout) {
  const std::vector<std::string> gold = {"applied", "macro", "finance", "theory", "metrics", "macro"};
  const std::vector<std::string> pred = {"applied", "macro", "macro", "theory", "metrics", "macro"};
  const auto text = render_report(report(confusion(pred, gold)));
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) lines.push_back(l);
  // Header, five classes, accuracy, macro avg, weighted avg.
  ASSERT_EQ(lines.size(), 9u);
  EXPECT_NE(lines[0].find("precision"), std::string::npos);
  EXPECT_EQ(lines[6].rfind("accuracy", 0), 0u);
  EXPECT_NE(lines[6].find("0.83"), std::string::npos);
  EXPECT_EQ(lines[7].rfind("macro avg", 0), 0u);
  EXPECT_EQ(lines[8].rfind("weighted avg", 0), 0u);
}

TEST(Report, CsvRows) {
  const std::vector<std::string> gold = {"female", "male", "male"};
  std::ostringstream out;
  write_report_csv(report(confusion(gold, gold)), out);
  const auto t = csv::Table::parse(out.str());
  EXPECT_EQ(t.header(), (std::vector<std::string>{"label", "precision", "recall", "f1", "support"}));
  ASSERT_EQ(t.rows().size(), 5u);
  EXPECT_EQ(t.rows()[2].fields[0], "accuracy");
  EXPECT_EQ(t.rows()[4].fields[0], "weighted avg");
}
