#include "generators.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace gen {

double uniform01(std::mt19937_64& rng) { return std::ldexp(static_cast<double>(rng() >> 11), -53); }

double normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t below(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(bound));
}

Eigen::MatrixXd random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
  return m;
}

namespace {

const std::vector<std::string> kPhrases = {
    "The candidate is an outstanding and creative economist.",
    "Her job market paper is rigorous, original and insightful.",
    "His work is careful but the contribution is somewhat narrow.",
    "The empirical design is strong and the results are convincing.",
    "Progress on the second chapter has been slow.",
    "I have some concern that the theory section remains unclear.",
    "She is a talented, independent and productive researcher.",
    "Unfortunately the teaching evaluations were average.",
    "The candidate is enthusiastic about policy questions.",
    "This is a promising agenda with remarkable breadth.",
    "The writing is occasionally inconsistent.",
    "Among my students over the last decade, the candidate is among the best.",
    "The dissertation addresses a difficult question with modest data.",
    "Colleagues describe the candidate as superb in seminars.",
    "The model is estimated on administrative records from three countries.",
    "We met weekly during the final two years of the program.",
};

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& options) {
  return options[below(rng, options.size())];
}

}  // namespace

std::string letter_text(std::mt19937_64& rng, std::size_t sentences) {
  std::string text = "I am pleased to write on behalf of this candidate.";
  for (std::size_t s = 0; s < sentences; ++s) {
    text += ' ';
    text += pick(rng, kPhrases);
  }
  return text;
}

promptsent::Corpus synthetic_corpus(std::size_t n_candidates, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> sexes = {"female", "male"};
  const std::vector<std::string> fields = {"applied", "finance", "macro", "metrics", "theory"};
  const std::vector<std::string> regions = {"americas", "asia", "europe"};
  const std::vector<std::string> ranks = {"other", "top10", "top30"};
  const std::vector<std::string> years = {"2017", "2018", "2019", "2020"};
  promptsent::Corpus corpus;
  std::size_t letter = 0;
  for (std::size_t c = 0; c < n_candidates; ++c) {
    char cid[16];
    std::snprintf(cid, sizeof cid, "c%03zu", c);
    std::map<std::string, std::string> meta = {
        {"sex", pick(rng, sexes)},     {"field", pick(rng, fields)}, {"region", pick(rng, regions)},
        {"phd_rank", pick(rng, ranks)}, {"year", pick(rng, years)},
    };
    char univ[16];
    std::snprintf(univ, sizeof univ, "u%02zu", below(rng, 12));
    meta["univ"] = univ;
    for (const auto& o : kOutcomes) meta[o] = uniform01(rng) < 0.4 ? "1" : "0";
    const std::size_t n_letters = 2 + below(rng, 4);
    const bool adviser = uniform01(rng) < 0.85;
    for (std::size_t l = 0; l < n_letters; ++l) {
      promptsent::Document d;
      char id[16];
      std::snprintf(id, sizeof id, "L%05zu", letter++);
      d.id = id;
      d.candidate_id = cid;
      d.writer_id = "w" + std::to_string(below(rng, 400));
      d.text = letter_text(rng, 3 + below(rng, 10));
      d.meta = meta;
      d.meta["is_adviser"] = (adviser && l == 0) ? "1" : "0";
      corpus.add(std::move(d));
    }
  }
  return corpus;
}

promptsent::Dataset separable_dataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  promptsent::Dataset d;
  d.class_names = {"failure", "success"};
  d.features = {{"x1", promptsent::FeatureKind::continuous, {}, {}},
                {"x2", promptsent::FeatureKind::continuous, {}, {}},
                {"noise_c", promptsent::FeatureKind::continuous, {}, {}},
                {"noise_k", promptsent::FeatureKind::categorical, {}, {"a", "b", "c"}}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = 2.0 * uniform01(rng) - 1.0;
    const double x2 = 2.0 * uniform01(rng) - 1.0;
    d.features[0].values.push_back(x1);
    d.features[1].values.push_back(x2);
    d.features[2].values.push_back(normal(rng));
    d.features[3].values.push_back(static_cast<double>(below(rng, 3)));
    d.labels.push_back(x1 > 0.0 && x2 > -0.5 ? 1 : 0);
  }
  return d;
}

}  // namespace gen
