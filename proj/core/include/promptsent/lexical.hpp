#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "promptsent/corpus.hpp"

namespace promptsent {

// Dictionary of lowercase terms with real scores (usually -1, 0 or +1).
class Lexicon {
 public:
  static Lexicon create(std::string name, std::vector<std::pair<std::string, double>> entries);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return scores_.size(); }
  std::optional<double> score(std::string_view term) const;
  const std::map<std::string, double, std::less<>>& entries() const noexcept { return scores_; }

  // Same lexicon keyed by Porter stems. Terms sharing a stem must agree on
  // the score.
  Lexicon stemmed() const;

 private:
  std::string name_;
  std::map<std::string, double, std::less<>> scores_;
};

// CSV with header term,score.
Lexicon load_lexicon(const std::filesystem::path& path);

using StopwordSet = std::unordered_set<std::string>;
// One term per line; blank lines and lines starting with '#' are skipped.
StopwordSet load_stopwords(const std::filesystem::path& path);

// Lowercases, treats ASCII punctuation as a separator (apostrophes are
// dropped so "don't" -> "dont"), removes stopwords and optionally applies
// the Porter stemmer.
std::vector<std::string> preprocess(std::string_view text, const StopwordSet& stopwords, bool stem);

// Classic Porter (1980) suffix stripping. Words of two letters or fewer and
// words with non-ASCII-letter bytes are returned unchanged.
std::string porter_stem(std::string_view word);

// sum(S_i) / sum(|S_i|) over terms found in the lexicon; undefined when no
// term matches (or all matches score 0).
std::optional<double> lexical_polarity(std::span<const std::string> terms, const Lexicon& lexicon);

using TextScorer = std::function<std::optional<double>(std::string_view)>;

enum class ChunkWeighting { unweighted, by_length };

// Mean of scorer over chunk(text, max_units, unit), skipping undefined chunk
// scores. by_length weights each chunk by its unit count.
std::optional<double> chunked_average(const TextScorer& scorer, std::string_view text,
                                      std::size_t max_units, ChunkUnit unit,
                                      ChunkWeighting weighting = ChunkWeighting::unweighted);

}  // namespace promptsent
