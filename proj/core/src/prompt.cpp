#include "promptsent/prompt.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "promptsent/errors.hpp"

namespace promptsent {

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "prefix") return TemplateKind::prefix;
  if (name == "cloze") return TemplateKind::cloze;
  throw InvalidArgument("unknown template kind '" + std::string(name) + "'");
}

std::string_view to_string(TemplateKind kind) noexcept {
  return kind == TemplateKind::prefix ? "prefix" : "cloze";
}

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool only_whitespace(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

void rstrip(std::string& s) {
  const auto end = s.find_last_not_of(" \t\r\n");
  s.erase(end == std::string::npos ? 0 : end + 1);
}

}  // namespace

PromptTemplate PromptTemplate::create(std::string text, TemplateKind kind) {
  if (count_occurrences(text, kInputSlot) != 1) {
    throw InvalidArgument("template must contain exactly one [X] slot: '" + text + "'");
  }
  const auto masks = count_occurrences(text, kMaskSlot);
  if (masks > 1) throw InvalidArgument("template has more than one [MASK] slot: '" + text + "'");
  const auto input_pos = text.find(kInputSlot);
  const auto mask_pos = text.find(kMaskSlot);
  if (kind == TemplateKind::cloze && masks != 1) {
    throw InvalidArgument("cloze template needs exactly one [MASK]: '" + text + "'");
  }
  if (kind == TemplateKind::prefix && masks == 1 &&
      !only_whitespace(std::string_view(text).substr(mask_pos + kMaskSlot.size()))) {
    throw InvalidArgument("prefix template must end with [MASK]: '" + text + "'");
  }
  return PromptTemplate(std::move(text), kind, input_pos, mask_pos);
}

bool PromptTemplate::answer_is_next_token() const noexcept {
  if (!has_mask()) return true;
  return only_whitespace(std::string_view(text_).substr(mask_pos_ + kMaskSlot.size()));
}

std::string PromptTemplate::fixed_text() const {
  std::string out = text_;
  if (has_mask()) out.erase(mask_pos_, kMaskSlot.size());
  out.erase(out.find(kInputSlot), kInputSlot.size());
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl, const Document& doc,
                          bool backend_accepts_cloze) {
  const std::string& t = tmpl.text_;
  const bool strip_mask = tmpl.answer_is_next_token();
  if (!strip_mask && !backend_accepts_cloze) {
    throw UnsupportedCapabilityError(
        "template has a non-terminal [MASK] but the backend only scores the next token");
  }
  // Slots are located in the template, never in the substituted text.
  std::string out;
  out.reserve(t.size() + doc.text.size());
  const auto x = tmpl.input_pos_;
  const auto m = tmpl.mask_pos_;
  auto append_range = [&](std::size_t from, std::size_t to) {
    if (strip_mask && m != std::string::npos && m >= from && m < to) {
      out.append(t, from, m - from);
      out.append(t, m + kMaskSlot.size(), to - m - kMaskSlot.size());
    } else {
      out.append(t, from, to - from);
    }
  };
  append_range(0, x);
  out += doc.text;
  append_range(x + kInputSlot.size(), t.size());
  if (strip_mask) rstrip(out);
  return out;
}

Verbalizer Verbalizer::create(std::vector<Entry> entries) {
  if (entries.empty()) throw InvalidArgument("verbalizer has no labels");
  std::set<std::string> labels;
  std::unordered_map<std::string, std::string> owner;
  for (const auto& [label, surfaces] : entries) {
    if (label.empty()) throw InvalidArgument("verbalizer label is empty");
    if (!labels.insert(label).second) throw InvalidArgument("duplicate verbalizer label '" + label + "'");
    if (surfaces.empty()) throw InvalidArgument("label '" + label + "' has no surfaces");
    for (const auto& s : surfaces) {
      auto [it, inserted] = owner.emplace(s, label);
      if (!inserted) {
        throw InvalidArgument("surface '" + s + "' appears under '" + it->second + "' and '" +
                              label + "'");
      }
    }
  }
  return Verbalizer(std::move(entries));
}

std::vector<std::string> Verbalizer::labels() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<std::string> Verbalizer::surfaces() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.insert(out.end(), e.second.begin(), e.second.end());
  return out;
}

std::optional<std::string> Verbalizer::label_of(std::string_view surface) const {
  for (const auto& [label, surfaces] : entries_) {
    if (std::find(surfaces.begin(), surfaces.end(), surface) != surfaces.end()) return label;
  }
  return std::nullopt;
}

bool Verbalizer::has_label(std::string_view label) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == label; });
}

std::optional<double> LabelDistribution::find(std::string_view label) const {
  for (const auto& m : masses) {
    if (m.label == label) return m.mass;
  }
  return std::nullopt;
}

double LabelDistribution::mass(std::string_view label) const {
  if (auto m = find(label)) return *m;
  throw MissingLabelError(std::string(label));
}

LabelDistribution distribution_from_probes(const Verbalizer& verbalizer,
                                           std::span<const TokenProbe> probes, bool renormalize) {
  std::vector<std::string> absent;
  for (const auto& p : probes) {
    if (p.status == VocabStatus::absent) absent.push_back(p.surface);
  }
  if (!absent.empty()) throw AbsentSurfaceError(std::move(absent));

  LabelDistribution dist;
  std::size_t k = 0;
  for (const auto& [label, surfaces] : verbalizer.entries()) {
    double mass = 0.0;
    for (std::size_t i = 0; i < surfaces.size(); ++i, ++k) {
      if (k >= probes.size() || probes[k].surface != surfaces[i]) {
        throw InvalidArgument("probes do not line up with the verbalizer surfaces");
      }
      mass += probes[k].probability;
    }
    dist.masses.push_back({label, mass});
  }
  for (const auto& m : dist.masses) dist.total_mass += m.mass;
  if (renormalize) {
    if (dist.total_mass <= 0.0) {
      throw DegenerateDistributionError("cannot renormalize a distribution with zero total mass");
    }
    for (auto& m : dist.masses) m.mass /= dist.total_mass;
    dist.renormalized = true;
  }
  return dist;
}

LabelDistribution label_probabilities(const Backend& backend, const PromptTemplate& tmpl,
                                      const Verbalizer& verbalizer, const Document& doc,
                                      bool renormalize) {
  const auto prompt = render_prompt(tmpl, doc, backend.accepts_cloze());
  const auto surfaces = verbalizer.surfaces();
  const auto probes = backend.next_token_mass(prompt, surfaces);
  if (probes.size() != surfaces.size()) {
    throw TransportError("backend returned " + std::to_string(probes.size()) + " probes for " +
                         std::to_string(surfaces.size()) + " surfaces");
  }
  return distribution_from_probes(verbalizer, probes, renormalize);
}

bool is_positive_label(std::string_view label) noexcept {
  return label == "positive" || label == "+";
}

bool is_negative_label(std::string_view label) noexcept {
  return label == "negative" || label == "-" || label == "−";
}

namespace {

std::optional<double> find_where(const LabelDistribution& dist, bool (*pred)(std::string_view) noexcept) {
  for (const auto& m : dist.masses) {
    if (pred(m.label)) return m.mass;
  }
  return std::nullopt;
}

}  // namespace

bool has_polarity_labels(const LabelDistribution& dist) noexcept {
  return find_where(dist, is_positive_label) && find_where(dist, is_negative_label);
}

bool has_standout_labels(const LabelDistribution& dist) noexcept {
  return dist.find("standout") && dist.find("grindstone");
}

double polarity(const LabelDistribution& dist) {
  const auto pos = find_where(dist, is_positive_label);
  if (!pos) throw MissingLabelError("positive");
  const auto neg = find_where(dist, is_negative_label);
  if (!neg) throw MissingLabelError("negative");
  return *pos - *neg;
}

double net_standout(const LabelDistribution& dist) {
  return dist.mass("standout") - dist.mass("grindstone");
}

std::string classify(const LabelDistribution& dist) {
  if (dist.masses.empty()) throw InvalidArgument("classify: empty distribution");
  const LabelMass* best = &dist.masses.front();
  for (const auto& m : dist.masses) {
    if (m.mass > best->mass || (m.mass == best->mass && m.label < best->label)) best = &m;
  }
  return best->label;
}

LabelDistribution average_distributions(std::span<const LabelDistribution> parts) {
  if (parts.empty()) throw InvalidArgument("average_distributions: nothing to average");
  LabelDistribution out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].masses.size() != out.masses.size()) {
      throw InvalidArgument("average_distributions: label sets differ");
    }
    for (std::size_t k = 0; k < out.masses.size(); ++k) out.masses[k].mass += parts[i].masses[k].mass;
    out.total_mass += parts[i].total_mass;
  }
  const auto n = static_cast<double>(parts.size());
  for (auto& m : out.masses) m.mass /= n;
  out.total_mass /= n;
  return out;
}

}  // namespace promptsent
