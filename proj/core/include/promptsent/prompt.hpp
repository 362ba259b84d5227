#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptsent/backend.hpp"
#include "promptsent/corpus.hpp"

namespace promptsent {

inline constexpr std::string_view kInputSlot = "[X]";
inline constexpr std::string_view kMaskSlot = "[MASK]";

enum class TemplateKind { prefix, cloze };

TemplateKind parse_template_kind(std::string_view name);
std::string_view to_string(TemplateKind kind) noexcept;

// Template text with exactly one [X] slot and at most one [MASK] slot.
// Prefix templates end with [MASK] or omit it; cloze templates contain one.
class PromptTemplate {
 public:
  static PromptTemplate create(std::string text, TemplateKind kind);

  const std::string& text() const noexcept { return text_; }
  TemplateKind kind() const noexcept { return kind_; }
  bool has_mask() const noexcept { return mask_pos_ != std::string::npos; }
  // True when nothing but whitespace follows the mask (or there is no mask).
  bool answer_is_next_token() const noexcept;
  // Template text without slots, for budgeting.
  std::string fixed_text() const;

 private:
  PromptTemplate(std::string text, TemplateKind kind, std::size_t input_pos, std::size_t mask_pos)
      : text_(std::move(text)), kind_(kind), input_pos_(input_pos), mask_pos_(mask_pos) {}

  std::string text_;
  TemplateKind kind_;
  std::size_t input_pos_;
  std::size_t mask_pos_;
  friend std::string render_prompt(const PromptTemplate&, const Document&, bool);
};

// Replaces [X] with the document text. When the answer is the next token the
// mask and any trailing whitespace are removed. A mask followed by more text
// is kept verbatim for cloze-capable backends; prefix-only backends get an
// UnsupportedCapabilityError.
std::string render_prompt(const PromptTemplate& tmpl, const Document& doc,
                          bool backend_accepts_cloze = false);

// Label -> permissible answer surfaces. Labels are distinct and no surface
// maps to two labels. Label order is preserved.
class Verbalizer {
 public:
  using Entry = std::pair<std::string, std::vector<std::string>>;

  static Verbalizer create(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<std::string> labels() const;
  // Surfaces of all labels, flattened in label order.
  std::vector<std::string> surfaces() const;
  std::optional<std::string> label_of(std::string_view surface) const;
  bool has_label(std::string_view label) const;

 private:
  explicit Verbalizer(std::vector<Entry> entries) : entries_(std::move(entries)) {}
  std::vector<Entry> entries_;
};

struct LabelMass {
  std::string label;
  double mass = 0.0;

  bool operator==(const LabelMass&) const = default;
};

// Per-label probability mass. total_mass is the raw mass before any
// renormalization.
struct LabelDistribution {
  std::vector<LabelMass> masses;
  double total_mass = 0.0;
  bool renormalized = false;

  std::optional<double> find(std::string_view label) const;
  // Throws MissingLabelError.
  double mass(std::string_view label) const;

  bool operator==(const LabelDistribution&) const = default;
};

// mass(y) = sum of next-token probabilities of the surfaces mapped to y.
// Throws AbsentSurfaceError for absent surfaces and
// DegenerateDistributionError when renormalizing zero mass.
LabelDistribution label_probabilities(const Backend& backend, const PromptTemplate& tmpl,
                                      const Verbalizer& verbalizer, const Document& doc,
                                      bool renormalize = false);

// Sums probes into label masses (shared by label_probabilities and callers
// holding precomputed probes).
LabelDistribution distribution_from_probes(const Verbalizer& verbalizer,
                                           std::span<const TokenProbe> probes, bool renormalize);

// Labels accepted as the positive / negative side of a sentiment verbalizer.
bool is_positive_label(std::string_view label) noexcept;
bool is_negative_label(std::string_view label) noexcept;
bool has_polarity_labels(const LabelDistribution& dist) noexcept;
bool has_standout_labels(const LabelDistribution& dist) noexcept;

// mass(positive) - mass(negative). Positive accepts "positive" or "+";
// negative accepts "negative", "-" or U+2212.
double polarity(const LabelDistribution& dist);
// mass(standout) - mass(grindstone); sign preserved.
double net_standout(const LabelDistribution& dist);
// Label with maximal mass; exact ties go to the lexicographically smallest.
std::string classify(const LabelDistribution& dist);

// Mean of the per-chunk distributions (masses and total mass).
LabelDistribution average_distributions(std::span<const LabelDistribution> parts);

}  // namespace promptsent
