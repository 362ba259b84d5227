#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptsent/corpus.hpp"
#include "promptsent/csv.hpp"

namespace promptsent {

// Letter-level inputs to the candidate aggregation.
struct LetterScore {
  std::string document_id;
  std::string candidate_id;
  bool is_adviser = false;
  std::size_t word_count = 0;
  std::optional<double> polarity;
  std::optional<double> standout;
  std::optional<double> grindstone;
  std::map<std::string, std::string> meta;
};

struct Dispersion {
  double range = 0.0;
  double mad = 0.0;  // mean absolute deviation from the mean
  double sd = 0.0;   // population standard deviation
};

// Throws InvalidArgument for fewer than two values.
Dispersion dispersion(std::span<const double> values);

struct CandidateAggregate {
  std::string candidate_id;
  std::size_t n_letters = 0;
  std::size_t n_scored = 0;  // letters with a defined polarity
  double avg_length_thousands = 0.0;
  std::optional<double> avg_sentiment_pp;
  std::optional<double> avg_standout_pp;
  std::optional<double> avg_grindstone_pp;
  // Polarity dispersion in percentage points; needs two scored letters.
  std::optional<Dispersion> dispersion_pp;
  bool has_adviser_letter = false;
  bool has_undefined_polarity = false;
  // Metadata on which every letter of the candidate agrees.
  std::map<std::string, std::string> meta;
};

// One row per candidate, ordered by candidate_id. Letters are summed in
// document_id order so the result does not depend on input order.
std::vector<CandidateAggregate> aggregate(std::span<const LetterScore> letters);

// Candidates with at least three letters, one of them from the adviser.
bool is_complete_application(const CandidateAggregate& c) noexcept;
std::vector<CandidateAggregate> complete_applications(std::span<const CandidateAggregate> candidates);

// "1", "true", "yes" (any case) are true.
bool parse_flag(std::string_view value) noexcept;

struct ScoreColumns {
  std::string polarity = "polarity";
  std::string standout = "mass_standout";
  std::string grindstone = "mass_grindstone";
};

// Joins a scores table (keyed by its "id" column) to the corpus. Columns that
// are missing from the table leave the field unset; is_adviser comes from the
// document metadata. Every corpus document must have a score row.
std::vector<LetterScore> letters_from_scores(const Corpus& corpus, const csv::Table& scores,
                                             const ScoreColumns& columns = {});

// Columns: candidate_id, n_letters, n_scored, avg_length_thousands,
// avg_sentiment_pp, avg_standout_pp, avg_grindstone_pp, range_pp, mad_pp,
// sd_pp, has_adviser_letter, has_undefined_polarity, complete_application,
// then the union of metadata keys in sorted order.
void write_aggregates_csv(std::span<const CandidateAggregate> candidates, std::ostream& out);

}  // namespace promptsent
