#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "promptsent/aggregate.hpp"
#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"

using namespace promptsent;

namespace {

LetterScore letter(std::string id, std::string cand, std::size_t words, std::optional<double> pol,
                   bool adviser = false) {
  LetterScore s;
  s.document_id = std::move(id);
  s.candidate_id = std::move(cand);
  s.word_count = words;
  s.polarity = pol;
  s.is_adviser = adviser;
  return s;
}

// Direct recomputation: mean, mean |deviation|, population sd.
Dispersion dispersion_oracle(const std::vector<double>& v) {
  long double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  long double mad = 0, ss = 0;
  for (double x : v) {
    mad += std::fabs(x - mean);
    ss += (x - mean) * (x - mean);
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*hi - *lo, static_cast<double>(mad / v.size()), static_cast<double>(std::sqrt(ss / v.size()))};
}

}  // namespace

TEST(Aggregate, SingleLetter) {
  const std::vector<LetterScore> in = {letter("L1", "c1", 2000, 0.07, true)};
  const auto out = aggregate(in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].avg_length_thousands, 2.0);
  EXPECT_DOUBLE_EQ(*out[0].avg_sentiment_pp, 7.0);
  EXPECT_FALSE(out[0].dispersion_pp);
}

TEST(Aggregate, ThreeLetterDispersion) {
  const std::vector<LetterScore> in = {letter("L1", "c1", 1000, 0.05, true), letter("L2", "c1", 1000, 0.07),
                                       letter("L3", "c1", 1000, 0.10)};
  const auto out = aggregate(in);
  ASSERT_TRUE(out[0].dispersion_pp);
  const auto& d = *out[0].dispersion_pp;
  EXPECT_NEAR(d.range, 5.0, 1e-12);
  const auto o = dispersion_oracle({5.0, 7.0, 10.0});
  EXPECT_NEAR(d.mad, o.mad, 1e-12);
  EXPECT_NEAR(d.sd, o.sd, 1e-12);
  EXPECT_NEAR(d.mad, 1.7778, 1e-4);
  EXPECT_NEAR(d.sd, 2.0548, 1e-4);
  EXPECT_TRUE(is_complete_application(out[0]));
}

TEST(Dispersion, Examples) {
  const std::vector<double> same = {0.3, 0.3};
  const auto d0 = dispersion(same);
  EXPECT_EQ(d0.range, 0.0);
  EXPECT_EQ(d0.mad, 0.0);
  EXPECT_EQ(d0.sd, 0.0);
  const std::vector<double> zo = {0.0, 1.0};
  const auto d1 = dispersion(zo);
  EXPECT_EQ(d1.range, 1.0);
  EXPECT_EQ(d1.mad, 0.5);
  EXPECT_EQ(d1.sd, 0.5);
  EXPECT_THROW(dispersion(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Dispersion, TranslationInvarianceAndOrdering) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(2 + gen::below(rng, 6));
    for (auto& x : v) x = 2.0 * gen::uniform01(rng) - 1.0;
    const auto d = dispersion(v);
    const auto o = dispersion_oracle(v);
    EXPECT_NEAR(d.mad, o.mad, 1e-12);
    EXPECT_NEAR(d.sd, o.sd, 1e-12);
    EXPECT_LE(d.mad, d.sd);
    EXPECT_LE(d.sd, d.range);
    auto shifted = v;
    for (auto& x : shifted) x += 0.375;
    const auto s = dispersion(shifted);
    EXPECT_NEAR(s.range, d.range, 1e-12);
    EXPECT_NEAR(s.mad, d.mad, 1e-12);
    EXPECT_NEAR(s.sd, d.sd, 1e-12);
  }
}

TEST(CompleteApplication, Rule) {
  auto make = [](std::size_t n, bool adviser) {
    std::vector<LetterScore> in;
    for (std::size_t i = 0; i < n; ++i) in.push_back(letter("L" + std::to_string(i), "c", 100, 0.1, adviser && i == 0));
    return aggregate(in).front();
  };
  EXPECT_TRUE(is_complete_application(make(3, true)));
  EXPECT_FALSE(is_complete_application(make(4, false)));
  EXPECT_FALSE(is_complete_application(make(2, true)));
  const std::vector<CandidateAggregate> all = {make(3, true), make(2, true)};
  EXPECT_EQ(complete_applications(all).size(), 1u);
}

TEST(Aggregate, UndefinedPolarityAndOrderIndependence) {
  std::vector<LetterScore> in = {letter("L3", "c2", 300, std::nullopt), letter("L1", "c1", 100, 0.2, true),
                                 letter("L2", "c2", 500, 0.1, true), letter("L4", "c2", 200, -0.3)};
  in[0].meta = {{"sex", "male"}, {"year", "2019"}};
  in[2].meta = {{"sex", "male"}, {"year", "2020"}};
  in[3].meta = {{"sex", "male"}, {"year", "2019"}};
  const auto out = aggregate(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].candidate_id, "c1");
  const auto& c2 = out[1];
  EXPECT_EQ(c2.n_letters, 3u);
  EXPECT_EQ(c2.n_scored, 2u);
  EXPECT_TRUE(c2.has_undefined_polarity);
  EXPECT_DOUBLE_EQ(*c2.avg_sentiment_pp, 100.0 * (0.1 - 0.3) / 2.0);
  EXPECT_DOUBLE_EQ(c2.avg_length_thousands, 1.0 / 3.0);
  EXPECT_EQ(c2.meta, (std::map<std::string, std::string>{{"sex", "male"}}));
  std::reverse(in.begin(), in.end());
  const auto again = aggregate(in);
  EXPECT_EQ(*again[1].avg_sentiment_pp, *c2.avg_sentiment_pp);
}

TEST(ParseFlag, Values) {
  EXPECT_TRUE(parse_flag("1"));
  EXPECT_TRUE(parse_flag("TRUE"));
  EXPECT_TRUE(parse_flag("yes"));
  EXPECT_FALSE(parse_flag("0"));
  EXPECT_FALSE(parse_flag(""));
}

TEST(LettersFromScores, JoinAndCsv) {
  const auto corpus = gen::synthetic_corpus(6, 8);
  std::ostringstream scores;
  csv::Writer w(scores);
  w.row({"id", "polarity", "mass_standout", "mass_grindstone"});
  for (std::size_t i = 0; i < corpus.size(); ++i)
    w.row({corpus[i].id, i % 5 == 0 ? "NA" : csv::format_double(0.01 * static_cast<double>(i)), "0.2", "0.1"});
  const auto letters = letters_from_scores(corpus, csv::Table::parse(scores.str()));
  ASSERT_EQ(letters.size(), corpus.size());
  EXPECT_FALSE(letters[0].polarity);
  EXPECT_EQ(letters[1].polarity, 0.01);
  EXPECT_EQ(letters[0].is_adviser, parse_flag(corpus[0].meta.at("is_adviser")));
  EXPECT_FALSE(letters[0].meta.count("is_adviser"));

  std::ostringstream out;
  const auto aggs = aggregate(letters);
  write_aggregates_csv(aggs, out);
  const auto t = csv::Table::parse(out.str());
  EXPECT_EQ(t.rows().size(), 6u);
  EXPECT_EQ(t.header()[0], "candidate_id");
  EXPECT_TRUE(t.column("complete_application"));
  EXPECT_TRUE(t.column("univ"));
  EXPECT_TRUE(t.column("sd_pp"));

  std::ostringstream missing;
  csv::Writer mw(missing);
  mw.row({"id", "polarity"});
  mw.row({corpus[0].id, "0.1"});
  EXPECT_THROW(letters_from_scores(corpus, csv::Table::parse(missing.str())), Error);
}
