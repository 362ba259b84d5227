#include "promptsent/aggregate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>

#include "promptsent/errors.hpp"

namespace promptsent {

Dispersion dispersion(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("dispersion needs at least two values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  // Two values: both deviations are range / 2, which the two-pass sums only
  // reproduce up to rounding.
  if (values.size() == 2) return {range, range / 2.0, range / 2.0};
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double abs_dev = 0.0, sq_dev = 0.0;
  for (double v : values) {
    abs_dev += std::fabs(v - mean);
    sq_dev += (v - mean) * (v - mean);
  }
  return {range, abs_dev / n, std::sqrt(sq_dev / n)};
}

namespace {

std::optional<double> mean_pp(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return 100.0 * s / static_cast<double>(v.size());
}

CandidateAggregate collapse(std::vector<const LetterScore*> letters) {
  std::sort(letters.begin(), letters.end(),
            [](const LetterScore* a, const LetterScore* b) { return a->document_id < b->document_id; });
  CandidateAggregate c;
  c.candidate_id = letters.front()->candidate_id;
  c.n_letters = letters.size();
  std::vector<double> pol, sto, gri;
  double words = 0.0;
  for (const auto* l : letters) {
    words += static_cast<double>(l->word_count);
    c.has_adviser_letter = c.has_adviser_letter || l->is_adviser;
    if (l->polarity && std::isfinite(*l->polarity)) pol.push_back(*l->polarity);
    else c.has_undefined_polarity = true;
    if (l->standout) sto.push_back(*l->standout);
    if (l->grindstone) gri.push_back(*l->grindstone);
  }
  c.n_scored = pol.size();
  c.avg_length_thousands = words / static_cast<double>(c.n_letters) / 1000.0;
  c.avg_sentiment_pp = mean_pp(pol);
  c.avg_standout_pp = mean_pp(sto);
  c.avg_grindstone_pp = mean_pp(gri);
  if (pol.size() >= 2) {
    const auto d = dispersion(pol);
    c.dispersion_pp = Dispersion{100.0 * d.range, 100.0 * d.mad, 100.0 * d.sd};
  }
  c.meta = letters.front()->meta;
  for (const auto* l : letters) {
    for (auto it = c.meta.begin(); it != c.meta.end();) {
      const auto f = l->meta.find(it->first);
      if (f == l->meta.end() || f->second != it->second) it = c.meta.erase(it);
      else ++it;
    }
  }
  return c;
}

}  // namespace

std::vector<CandidateAggregate> aggregate(std::span<const LetterScore> letters) {
  std::map<std::string, std::vector<const LetterScore*>> groups;
  for (const auto& l : letters) groups[l.candidate_id].push_back(&l);
  std::vector<CandidateAggregate> out;
  out.reserve(groups.size());
  for (auto& [id, group] : groups) out.push_back(collapse(std::move(group)));
  return out;
}

bool is_complete_application(const CandidateAggregate& c) noexcept {
  return c.n_letters >= 3 && c.has_adviser_letter;
}

std::vector<CandidateAggregate> complete_applications(std::span<const CandidateAggregate> candidates) {
  std::vector<CandidateAggregate> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out), is_complete_application);
  return out;
}

bool parse_flag(std::string_view value) noexcept {
  std::string v;
  for (char ch : value) v += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return v == "1" || v == "true" || v == "yes";
}

std::vector<LetterScore> letters_from_scores(const Corpus& corpus, const csv::Table& scores,
                                             const ScoreColumns& columns) {
  const auto id_col = scores.require_column("id");
  std::map<std::string, const csv::Record*, std::less<>> by_id;
  for (const auto& r : scores.rows()) {
    if (!by_id.emplace(r.fields[id_col], &r).second) throw DuplicateIdError(r.fields[id_col]);
  }
  const auto pol_col = scores.column(columns.polarity);
  const auto sto_col = scores.column(columns.standout);
  const auto gri_col = scores.column(columns.grindstone);
  auto cell = [](const csv::Record& r, const std::optional<std::size_t>& col) -> std::optional<double> {
    if (!col) return std::nullopt;
    return csv::parse_double(r.fields[*col]);
  };

  std::vector<LetterScore> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    const auto it = by_id.find(doc.id);
    if (it == by_id.end()) throw InvalidArgument("no score row for document '" + doc.id + "'");
    LetterScore l;
    l.document_id = doc.id;
    l.candidate_id = doc.candidate_id;
    l.word_count = doc.word_count;
    l.meta = doc.meta;
    if (const auto f = doc.meta.find("is_adviser"); f != doc.meta.end()) {
      l.is_adviser = parse_flag(f->second);
      l.meta.erase("is_adviser");
    }
    l.polarity = cell(*it->second, pol_col);
    l.standout = cell(*it->second, sto_col);
    l.grindstone = cell(*it->second, gri_col);
    out.push_back(std::move(l));
  }
  return out;
}

void write_aggregates_csv(std::span<const CandidateAggregate> candidates, std::ostream& out) {
  std::set<std::string> keys;
  for (const auto& c : candidates)
    for (const auto& [k, v] : c.meta) keys.insert(k);

  csv::Writer w(out);
  std::vector<std::string> header = {"candidate_id",      "n_letters",        "n_scored",
                                     "avg_length_thousands", "avg_sentiment_pp", "avg_standout_pp",
                                     "avg_grindstone_pp", "range_pp",         "mad_pp",
                                     "sd_pp",             "has_adviser_letter", "has_undefined_polarity",
                                     "complete_application"};
  header.insert(header.end(), keys.begin(), keys.end());
  w.row(header);

  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (const auto& c : candidates) {
    const auto& d = c.dispersion_pp;
    std::vector<std::string> row = {
        c.candidate_id,
        std::to_string(c.n_letters),
        std::to_string(c.n_scored),
        csv::format_double(c.avg_length_thousands),
        csv::format_optional(c.avg_sentiment_pp),
        csv::format_optional(c.avg_standout_pp),
        csv::format_optional(c.avg_grindstone_pp),
        csv::format_optional(d ? std::optional(d->range) : std::nullopt),
        csv::format_optional(d ? std::optional(d->mad) : std::nullopt),
        csv::format_optional(d ? std::optional(d->sd) : std::nullopt),
        flag(c.has_adviser_letter),
        flag(c.has_undefined_polarity),
        flag(is_complete_application(c))};
    for (const auto& k : keys) {
      const auto it = c.meta.find(k);
      row.push_back(it == c.meta.end() ? std::string(csv::kMissing) : it->second);
    }
    w.row(row);
  }
}

}  // namespace promptsent
