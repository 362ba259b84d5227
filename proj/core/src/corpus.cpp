#include "promptsent/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "promptsent/csv.hpp"
#include "promptsent/errors.hpp"

namespace promptsent {

using json = nlohmann::json;

Corpus::Corpus(std::vector<Document> documents) {
  docs_.reserve(documents.size());
  for (auto& doc : documents) add(std::move(doc));
}

void Corpus::add(Document doc) {
  if (index_.count(doc.id)) throw DuplicateIdError(doc.id);
  doc.word_count = word_count(doc.text);
  index_.emplace(doc.id, docs_.size());
  docs_.push_back(std::move(doc));
}

const Document* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "csv") return CorpusFormat::csv;
  throw InvalidArgument("unknown corpus format '" + std::string(name) + "'");
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".json") return CorpusFormat::jsonl;
  if (ext == ".csv") return CorpusFormat::csv;
  throw InvalidArgument("cannot infer corpus format from '" + path.string() + "'");
}

namespace {

std::string scalar_to_string(const json& value, const std::string& key, std::size_t line) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  throw ParseError("field '" + key + "' must be a string", line);
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw ParseError(std::string("record is missing '") + key + "'", line);
  }
  if (!it->is_string()) throw ParseError(std::string("'") + key + "' must be a string", line);
  return it->get<std::string>();
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

Corpus read_jsonl(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("record is not a JSON object", line_no);
    Document doc;
    doc.id = required_string(obj, "id", line_no);
    doc.text = required_string(obj, "text", line_no);
    doc.candidate_id = required_string(obj, "candidate_id", line_no);
    if (auto it = obj.find("writer_id"); it != obj.end() && !it->is_null()) {
      doc.writer_id = scalar_to_string(*it, "writer_id", line_no);
    }
    if (auto it = obj.find("meta"); it != obj.end() && !it->is_null()) {
      if (!it->is_object()) throw ParseError("'meta' must be an object", line_no);
      for (const auto& [key, value] : it->items()) {
        doc.meta[key] = scalar_to_string(value, "meta." + key, line_no);
      }
    }
    corpus.add(std::move(doc));
  }
  return corpus;
}

Corpus read_csv(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto table = csv::Table::parse(buffer.str());
  Corpus corpus;
  if (table.header().empty()) return corpus;
  const auto id_col = table.column("id");
  const auto text_col = table.column("text");
  const auto cand_col = table.column("candidate_id");
  if (!id_col || !text_col || !cand_col) {
    throw ParseError("CSV header must contain id, text and candidate_id", 1);
  }
  const auto writer_col = table.column("writer_id");
  for (const auto& row : table.rows()) {
    Document doc;
    doc.id = row.fields[*id_col];
    doc.text = row.fields[*text_col];
    doc.candidate_id = row.fields[*cand_col];
    if (doc.id.empty()) throw ParseError("record has an empty id", row.line);
    if (doc.candidate_id.empty()) throw ParseError("record has an empty candidate_id", row.line);
    if (writer_col && !row.fields[*writer_col].empty()) doc.writer_id = row.fields[*writer_col];
    for (std::size_t c = 0; c < table.header().size(); ++c) {
      const auto& name = table.header()[c];
      if (name.rfind("meta_", 0) == 0 && !row.fields[c].empty()) {
        doc.meta[name.substr(5)] = row.fields[c];
      }
    }
    corpus.add(std::move(doc));
  }
  return corpus;
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus) {
    json obj = {{"id", doc.id}, {"text", doc.text}, {"candidate_id", doc.candidate_id}};
    if (doc.writer_id) obj["writer_id"] = *doc.writer_id;
    if (!doc.meta.empty()) obj["meta"] = doc.meta;
    out << obj.dump() << '\n';
  }
}

void write_csv(const Corpus& corpus, std::ostream& out) {
  std::set<std::string> meta_keys;
  for (const auto& doc : corpus) {
    for (const auto& [key, value] : doc.meta) meta_keys.insert(key);
  }
  csv::Writer writer(out);
  std::vector<std::string> header = {"id", "text", "candidate_id", "writer_id"};
  for (const auto& key : meta_keys) header.push_back("meta_" + key);
  writer.row(header);
  for (const auto& doc : corpus) {
    std::vector<std::string> row = {doc.id, doc.text, doc.candidate_id, doc.writer_id.value_or("")};
    for (const auto& key : meta_keys) {
      auto it = doc.meta.find(key);
      row.push_back(it == doc.meta.end() ? "" : it->second);
    }
    writer.row(row);
  }
}

// Decodes one UTF-8 sequence at text[i]; returns the code point and advances
// i. Invalid bytes decode as U+FFFD and consume a single byte.
char32_t decode_utf8(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= text.size()) return -1;
    const auto b = static_cast<unsigned char>(text[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const int c = cont(static_cast<std::size_t>(k));
    if (c < 0) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

}  // namespace

Corpus read_corpus(std::istream& in, CorpusFormat format) {
  return format == CorpusFormat::jsonl ? read_jsonl(in) : read_csv(in);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open corpus '" + path.string() + "'");
  return read_corpus(in, format);
}

void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format) {
  if (format == CorpusFormat::jsonl) {
    write_jsonl(corpus, out);
  } else {
    write_csv(corpus, out);
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write corpus '" + path.string() + "'");
  write_corpus(corpus, out, format);
}

bool is_unicode_space(char32_t cp) noexcept {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    const std::size_t at = i;
    const char32_t cp = decode_utf8(text, i);
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        words.push_back(text.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) words.push_back(text.substr(start));
  return words;
}

std::size_t word_count(std::string_view text) { return split_words(text).size(); }

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> sentences;
  auto push_trimmed = [&](std::string_view s) {
    const auto words = split_words(s);
    if (words.empty()) return;
    const auto* first = words.front().data();
    const auto* last = words.back().data() + words.back().size();
    sentences.emplace_back(first, static_cast<std::size_t>(last - first));
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    ++i;
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t next = i;
    const bool at_end = next >= text.size();
    bool followed_by_space = false;
    if (!at_end) followed_by_space = is_unicode_space(decode_utf8(text, next));
    if (at_end || followed_by_space) {
      push_trimmed(text.substr(start, i - start));
      start = i;
    }
  }
  if (start < text.size()) push_trimmed(text.substr(start));
  return sentences;
}

std::vector<std::string> chunk(std::string_view text, std::size_t max_units, ChunkUnit unit) {
  if (max_units == 0) throw InvalidArgument("chunk: max_units must be at least 1");
  const auto units = unit == ChunkUnit::word ? split_words(text) : split_sentences(text);
  std::vector<std::string> chunks;
  for (std::size_t i = 0; i < units.size(); i += max_units) {
    std::string piece;
    const std::size_t stop = std::min(units.size(), i + max_units);
    for (std::size_t k = i; k < stop; ++k) {
      if (k > i) piece += ' ';
      piece += units[k];
    }
    chunks.push_back(std::move(piece));
  }
  return chunks;
}

}  // namespace promptsent
