#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptsent {

enum class VocabStatus { single_token, multi_token, absent };

std::string_view to_string(VocabStatus status) noexcept;

// Next-token probability mass for one candidate answer. Surfaces absent from
// the vocabulary carry probability 0 and status absent; callers must check.
struct TokenProbe {
  std::string surface;
  double probability = 0.0;
  VocabStatus status = VocabStatus::single_token;

  bool operator==(const TokenProbe&) const = default;
};

struct VocabEntry {
  std::string surface;
  VocabStatus status = VocabStatus::single_token;

  bool operator==(const VocabEntry&) const = default;
};

// Each queried surface appears exactly once, in first-query order.
struct VocabReport {
  std::vector<VocabEntry> entries;

  std::optional<VocabStatus> status(std::string_view surface) const;
  std::vector<std::string> with_status(VocabStatus status) const;
  bool has_absent() const { return !with_status(VocabStatus::absent).empty(); }
};

// Source of next-token probabilities for prefix prompts.
class Backend {
 public:
  virtual ~Backend() = default;

  // One probe per requested surface, in request order. Throws
  // ContextOverflowError when the prompt does not fit the context.
  virtual std::vector<TokenProbe> next_token_mass(std::string_view prompt,
                                                  std::span<const std::string> surfaces) const = 0;

  // Throws UnsupportedCapabilityError unless the backend can tokenize.
  virtual VocabReport vocab_check(std::span<const std::string> surfaces) const;
  virtual std::size_t count_tokens(std::string_view text) const;
  virtual bool can_tokenize() const noexcept { return false; }

  virtual std::optional<std::size_t> context_size() const noexcept { return std::nullopt; }

  // Generative models only score the token after the prompt; masked models
  // may fill a mask anywhere.
  virtual bool accepts_cloze() const noexcept { return false; }

  virtual std::string name() const = 0;
};

// Mock probability: u/8 where u in (0, 1] comes from the FNV-1a digest of
// decimal(seed) 0x1F prompt 0x1F surface.
double mock_distribution(std::string_view prompt, std::string_view surface, std::uint64_t seed);

inline constexpr double kMockNormalizer = 8.0;
inline constexpr std::size_t kMockMaxWordLength = 12;

// Deterministic offline backend. Its tokenizer splits on whitespace; words
// longer than 12 code points are multi-token (one token per 12 code points).
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::uint64_t seed, std::size_t context_size = 8192)
      : seed_(seed), context_size_(context_size) {}

  std::vector<TokenProbe> next_token_mass(std::string_view prompt,
                                          std::span<const std::string> surfaces) const override;
  VocabReport vocab_check(std::span<const std::string> surfaces) const override;
  std::size_t count_tokens(std::string_view text) const override;
  bool can_tokenize() const noexcept override { return true; }
  std::optional<std::size_t> context_size() const noexcept override { return context_size_; }
  std::string name() const override { return "mock"; }

  std::uint64_t seed() const noexcept { return seed_; }
  static VocabStatus classify_surface(std::string_view surface);

 private:
  std::uint64_t seed_;
  std::size_t context_size_;
};

}  // namespace promptsent
