#include "promptsent/backend.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "promptsent/corpus.hpp"
#include "promptsent/digest.hpp"
#include "promptsent/errors.hpp"

namespace promptsent {

std::string_view to_string(VocabStatus status) noexcept {
  switch (status) {
    case VocabStatus::single_token: return "single_token";
    case VocabStatus::multi_token: return "multi_token";
    case VocabStatus::absent: return "absent";
  }
  return "absent";
}

std::optional<VocabStatus> VocabReport::status(std::string_view surface) const {
  for (const auto& e : entries) {
    if (e.surface == surface) return e.status;
  }
  return std::nullopt;
}

std::vector<std::string> VocabReport::with_status(VocabStatus wanted) const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.status == wanted) out.push_back(e.surface);
  }
  return out;
}

VocabReport Backend::vocab_check(std::span<const std::string>) const {
  throw UnsupportedCapabilityError("backend '" + name() + "' cannot tokenize");
}

std::size_t Backend::count_tokens(std::string_view) const {
  throw UnsupportedCapabilityError("backend '" + name() + "' cannot tokenize");
}

double mock_distribution(std::string_view prompt, std::string_view surface, std::uint64_t seed) {
  std::uint64_t h = fnv1a64(std::to_string(seed));
  h = fnv1a64(std::string_view("\x1f", 1), h);
  h = fnv1a64(prompt, h);
  h = fnv1a64(std::string_view("\x1f", 1), h);
  h = fnv1a64(surface, h);
  constexpr std::uint64_t two53 = std::uint64_t{1} << 53;
  double u = static_cast<double>(h % two53) / static_cast<double>(two53);
  if (u == 0.0) u = 1.0 / static_cast<double>(two53);
  return u / kMockNormalizer;
}

namespace {

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::size_t mock_word_tokens(std::string_view word) {
  const auto n = code_points(word);
  return (n + kMockMaxWordLength - 1) / kMockMaxWordLength;
}

}  // namespace

VocabStatus MockBackend::classify_surface(std::string_view surface) {
  const auto words = split_words(surface);
  if (words.empty()) return VocabStatus::absent;
  if (words.size() > 1 || mock_word_tokens(words.front()) > 1) return VocabStatus::multi_token;
  return VocabStatus::single_token;
}

std::vector<TokenProbe> MockBackend::next_token_mass(std::string_view prompt,
                                                     std::span<const std::string> surfaces) const {
  if (prompt.empty()) throw InvalidArgument("next_token_mass: empty prompt");
  if (surfaces.empty()) throw InvalidArgument("next_token_mass: no surfaces");
  const auto tokens = count_tokens(prompt);
  if (tokens > context_size_) throw ContextOverflowError(tokens, context_size_);
  std::vector<TokenProbe> probes;
  probes.reserve(surfaces.size());
  for (const auto& surface : surfaces) {
    TokenProbe probe{surface, 0.0, classify_surface(surface)};
    if (probe.status != VocabStatus::absent) probe.probability = mock_distribution(prompt, surface, seed_);
    probes.push_back(std::move(probe));
  }
  return probes;
}

VocabReport MockBackend::vocab_check(std::span<const std::string> surfaces) const {
  VocabReport report;
  std::unordered_set<std::string> seen;
  for (const auto& s : surfaces) {
    if (!seen.insert(s).second) continue;
    report.entries.push_back({s, classify_surface(s)});
  }
  return report;
}

std::size_t MockBackend::count_tokens(std::string_view text) const {
  std::size_t n = 0;
  for (auto w : split_words(text)) n += mock_word_tokens(w);
  return n;
}

}  // namespace promptsent
