#include <algorithm>
#include <string>
#include <string_view>

#include "promptsent/lexical.hpp"

namespace promptsent {
namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_consonant(std::string_view w, std::size_t i) {
  if (is_vowel_letter(w[i])) return false;
  if (w[i] == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
  return true;
}

// m in [C](VC){m}[V]
int measure(std::string_view stem) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < stem.size(); ++i) {
    const bool cons = is_consonant(stem, i);
    if (cons && prev_vowel) ++m;
    prev_vowel = !cons;
  }
  return m;
}

bool contains_vowel(std::string_view stem) {
  for (std::size_t i = 0; i < stem.size(); ++i)
    if (!is_consonant(stem, i)) return true;
  return false;
}

bool ends_double_consonant(std::string_view w) {
  const auto n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

bool ends_cvc(std::string_view w) {
  const auto n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::string_view drop(std::string_view w, std::size_t n) { return w.substr(0, w.size() - n); }

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  int min_measure;  // stem measure must exceed this
};

// First rule whose suffix matches wins, whether or not its condition holds.
template <std::size_t N>
std::string apply_rules(const std::string& word, const Rule (&rules)[N]) {
  for (const auto& r : rules) {
    if (!ends_with(word, r.suffix)) continue;
    const auto stem = drop(word, r.suffix.size());
    if (measure(stem) > r.min_measure) return std::string(stem) + std::string(r.replacement);
    return word;
  }
  return word;
}

std::string step1a(const std::string& w) {
  if (ends_with(w, "sses")) return std::string(drop(w, 2));
  if (ends_with(w, "ies")) return std::string(drop(w, 2));
  if (ends_with(w, "ss")) return w;
  if (ends_with(w, "s")) return std::string(drop(w, 1));
  return w;
}

std::string step1b(const std::string& w) {
  if (ends_with(w, "eed")) {
    const auto stem = drop(w, 3);
    return measure(stem) > 0 ? std::string(stem) + "ee" : w;
  }
  std::string stem;
  if (ends_with(w, "ed") && contains_vowel(drop(w, 2))) {
    stem = std::string(drop(w, 2));
  } else if (ends_with(w, "ing") && contains_vowel(drop(w, 3))) {
    stem = std::string(drop(w, 3));
  } else {
    return w;
  }
  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz")) return stem + "e";
  if (ends_double_consonant(stem)) {
    const char last = stem.back();
    if (last != 'l' && last != 's' && last != 'z') stem.pop_back();
    return stem;
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

std::string step1c(const std::string& w) {
  if (ends_with(w, "y") && contains_vowel(drop(w, 1))) return std::string(drop(w, 1)) + "i";
  return w;
}

constexpr Rule kStep2[] = {
    {"ational", "ate", 0}, {"tional", "tion", 0}, {"enci", "ence", 0}, {"anci", "ance", 0},
    {"izer", "ize", 0},    {"abli", "able", 0},   {"alli", "al", 0},   {"entli", "ent", 0},
    {"eli", "e", 0},       {"ousli", "ous", 0},   {"ization", "ize", 0}, {"ation", "ate", 0},
    {"ator", "ate", 0},    {"alism", "al", 0},    {"iveness", "ive", 0}, {"fulness", "ful", 0},
    {"ousness", "ous", 0}, {"aliti", "al", 0},    {"iviti", "ive", 0}, {"biliti", "ble", 0},
};

constexpr Rule kStep3[] = {
    {"icate", "ic", 0}, {"ative", "", 0}, {"alize", "al", 0}, {"iciti", "ic", 0},
    {"ical", "ic", 0},  {"ful", "", 0},   {"ness", "", 0},
};

constexpr Rule kStep4Before[] = {
    {"al", "", 1},   {"ance", "", 1}, {"ence", "", 1}, {"er", "", 1},    {"ic", "", 1},
    {"able", "", 1}, {"ible", "", 1}, {"ant", "", 1},  {"ement", "", 1}, {"ment", "", 1},
    {"ent", "", 1},
};

constexpr Rule kStep4After[] = {
    {"ou", "", 1},  {"ism", "", 1}, {"ate", "", 1}, {"iti", "", 1},
    {"ous", "", 1}, {"ive", "", 1}, {"ize", "", 1},
};

std::string step4(const std::string& w) {
  for (const auto& r : kStep4Before) {
    if (ends_with(w, r.suffix)) return apply_rules(w, kStep4Before);
  }
  if (ends_with(w, "ion")) {
    const auto stem = drop(w, 3);
    if (measure(stem) > 1 && !stem.empty() && (stem.back() == 's' || stem.back() == 't'))
      return std::string(stem);
    return w;
  }
  return apply_rules(w, kStep4After);
}

std::string step5a(const std::string& w) {
  if (!ends_with(w, "e")) return w;
  const auto stem = drop(w, 1);
  const int m = measure(stem);
  if (m > 1 || (m == 1 && !ends_cvc(stem))) return std::string(stem);
  return w;
}

std::string step5b(const std::string& w) {
  if (ends_with(w, "ll") && measure(drop(w, 1)) > 1) return std::string(drop(w, 1));
  return w;
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 2) return w;
  if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) return w;
  w = step1a(w);
  w = step1b(w);
  w = step1c(w);
  w = apply_rules(w, kStep2);
  w = apply_rules(w, kStep3);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

}  // namespace promptsent
