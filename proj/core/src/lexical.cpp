#include "promptsent/lexical.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"

namespace promptsent {

Lexicon Lexicon::create(std::string name, std::vector<std::pair<std::string, double>> entries) {
  Lexicon lex;
  lex.name_ = std::move(name);
  for (auto& [term, score] : entries) {
    if (term.empty()) throw InvalidArgument("lexicon '" + lex.name_ + "' has an empty term");
    for (char c : term) {
      if (std::isupper(static_cast<unsigned char>(c))) {
        throw InvalidArgument("lexicon term '" + term + "' is not lowercase");
      }
    }
    if (!std::isfinite(score)) throw InvalidArgument("lexicon term '" + term + "' has a non-finite score");
    if (!lex.scores_.emplace(term, score).second) {
      throw InvalidArgument("duplicate lexicon term '" + term + "'");
    }
  }
  return lex;
}

std::optional<double> Lexicon::score(std::string_view term) const {
  auto it = scores_.find(term);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

Lexicon Lexicon::stemmed() const {
  Lexicon out;
  out.name_ = name_;
  for (const auto& [term, score] : scores_) {
    auto stem = porter_stem(term);
    auto [it, inserted] = out.scores_.emplace(stem, score);
    if (!inserted && it->second != score) {
      throw InvalidArgument("lexicon terms sharing stem '" + stem + "' have different scores");
    }
  }
  return out;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  const auto table = csv::Table::read_file(path.string());
  const auto term_col = table.require_column("term");
  const auto score_col = table.require_column("score");
  std::vector<std::pair<std::string, double>> entries;
  for (const auto& row : table.rows()) {
    auto score = csv::parse_double(row.fields[score_col]);
    if (!score) throw ParseError("lexicon score is not a number", row.line);
    entries.emplace_back(row.fields[term_col], *score);
  }
  return Lexicon::create(path.stem().string(), std::move(entries));
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open stopword list '" + path.string() + "'");
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    line.erase(0, start);
    if (line.empty() || line.front() == '#') continue;
    for (auto& c : line) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.insert(line);
  }
  return out;
}

std::vector<std::string> preprocess(std::string_view text, const StopwordSet& stopwords, bool stem) {
  std::vector<std::string> terms;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!stopwords.count(current)) terms.push_back(stem ? porter_stem(current) : current);
    current.clear();
  };
  for (auto word : split_words(text)) {
    for (char ch : word) {
      const auto c = static_cast<unsigned char>(ch);
      if (c == '\'') continue;
      if (c < 0x80 && (std::ispunct(c) || std::isspace(c))) {
        flush();
      } else {
        current += static_cast<char>(std::tolower(c));
      }
    }
    flush();
  }
  return terms;
}

std::optional<double> lexical_polarity(std::span<const std::string> terms, const Lexicon& lexicon) {
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& term : terms) {
    if (auto s = lexicon.score(term)) {
      numerator += *s;
      denominator += std::abs(*s);
    }
  }
  if (denominator == 0.0) return std::nullopt;
  return numerator / denominator;
}

std::optional<double> chunked_average(const TextScorer& scorer, std::string_view text,
                                      std::size_t max_units, ChunkUnit unit,
                                      ChunkWeighting weighting) {
  const auto chunks = chunk(text, max_units, unit);
  double sum = 0.0;
  double weight = 0.0;
  for (const auto& piece : chunks) {
    const auto score = scorer(piece);
    if (!score) continue;
    double w = 1.0;
    if (weighting == ChunkWeighting::by_length) {
      w = static_cast<double>(unit == ChunkUnit::word ? word_count(piece)
                                                      : split_sentences(piece).size());
    }
    sum += w * *score;
    weight += w;
  }
  if (weight == 0.0) return std::nullopt;
  return sum / weight;
}

}  // namespace promptsent
