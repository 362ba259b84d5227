#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "promptsent/corpus.hpp"
#include "promptsent/forest.hpp"

namespace gen {

// Portable draws (std distributions differ across standard libraries).
double uniform01(std::mt19937_64& rng);
double normal(std::mt19937_64& rng);
std::size_t below(std::mt19937_64& rng, std::size_t bound);

Eigen::MatrixXd random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

// Letter text assembled from a phrase bank that mixes positive and negative
// lexicon words.
std::string letter_text(std::mt19937_64& rng, std::size_t sentences);

// Candidates with 2-5 letters each; every letter carries the candidate's
// metadata (sex, field, region, phd_rank, year, univ) and five binary
// outcomes (academic, top_placement, tenure_track, private_sector,
// central_bank). The first letter is the adviser's for most candidates.
promptsent::Corpus synthetic_corpus(std::size_t n_candidates, std::uint64_t seed);

inline const std::vector<std::string> kOutcomes = {"academic", "top_placement", "tenure_track", "private_sector",
                                                   "central_bank"};

// Features x1, x2 (informative), noise_c (continuous noise) and noise_k
// (categorical noise, 3 levels). Label "success" iff x1 > 0 and x2 > -0.5.
promptsent::Dataset separable_dataset(std::size_t n, std::uint64_t seed);

}  // namespace gen
