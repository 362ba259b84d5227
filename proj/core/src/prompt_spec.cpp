#include "promptsent/prompt_spec.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "promptsent/errors.hpp"
#include "promptsent/parallel.hpp"

namespace promptsent {

using ordered_json = nlohmann::ordered_json;

PromptSpec parse_prompt_spec(std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("malformed prompt spec: ") + e.what(), 0);
  }
  try {
    const auto name = j.at("name").get<std::string>();
    const auto kind = parse_template_kind(j.value("kind", std::string("prefix")));
    auto tmpl = PromptTemplate::create(j.at("template").get<std::string>(), kind);
    std::vector<Verbalizer::Entry> entries;
    for (const auto& [label, surfaces] : j.at("labels").items()) {
      entries.emplace_back(label, surfaces.get<std::vector<std::string>>());
    }
    return PromptSpec{name, std::move(tmpl), Verbalizer::create(std::move(entries)),
                      j.value("renormalize", false)};
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("invalid prompt spec: ") + e.what(), 0);
  }
}

PromptSpec load_prompt_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open prompt spec '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_prompt_spec(buffer.str());
}

std::string prompt_spec_to_json(const PromptSpec& spec) {
  ordered_json labels = ordered_json::object();
  for (const auto& [label, surfaces] : spec.verbalizer.entries()) labels[label] = surfaces;
  ordered_json j = {{"name", spec.name},
                    {"template", spec.tmpl.text()},
                    {"kind", std::string(to_string(spec.tmpl.kind()))},
                    {"labels", labels},
                    {"renormalize", spec.renormalize}};
  return j.dump(2);
}

PromptScorer::PromptScorer(const Backend& backend, PromptSpec spec)
    : backend_(backend), spec_(std::move(spec)) {
  if (backend_.can_tokenize()) {
    vocab_ = backend_.vocab_check(spec_.verbalizer.surfaces());
    if (vocab_.has_absent()) throw AbsentSurfaceError(vocab_.with_status(VocabStatus::absent));
    for (const auto& s : vocab_.with_status(VocabStatus::multi_token)) {
      warnings_.push_back("surface '" + s + "' is multi-token; scored by its first sub-token");
    }
  } else {
    warnings_.push_back("backend '" + backend_.name() + "' cannot tokenize; vocabulary not checked");
  }
}

DocumentScore PromptScorer::score(const Document& doc) const {
  DocumentScore result;
  result.document_id = doc.id;
  const auto context = backend_.context_size();
  if (context && backend_.can_tokenize()) {
    const auto rendered = render_prompt(spec_.tmpl, doc, backend_.accepts_cloze());
    const auto needed = backend_.count_tokens(rendered);
    if (needed > *context) {
      const auto template_tokens = backend_.count_tokens(spec_.tmpl.fixed_text());
      if (*context <= template_tokens + kContextMargin) {
        throw ContextOverflowError(template_tokens + kContextMargin + 1, *context);
      }
      const auto max_words = *context - template_tokens - kContextMargin;
      std::vector<LabelDistribution> parts;
      for (auto& piece : chunk(doc.text, max_words, ChunkUnit::word)) {
        Document part = doc;
        part.text = std::move(piece);
        parts.push_back(label_probabilities(backend_, spec_.tmpl, spec_.verbalizer, part,
                                            spec_.renormalize));
      }
      result.distribution = average_distributions(parts);
      result.n_chunks = parts.size();
      return result;
    }
  }
  result.distribution =
      label_probabilities(backend_, spec_.tmpl, spec_.verbalizer, doc, spec_.renormalize);
  return result;
}

std::vector<DocumentScore> PromptScorer::score_all(std::span<const Document> docs,
                                                   unsigned jobs) const {
  std::vector<DocumentScore> out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = score(docs[i]); });
  return out;
}

}  // namespace promptsent
