#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptsent {

// One text unit (a letter) plus its metadata. Metadata values stay opaque
// strings until the stats layer encodes them.
struct Document {
  std::string id;
  std::string text;
  std::string candidate_id;
  std::optional<std::string> writer_id;
  std::map<std::string, std::string> meta;
  std::size_t word_count = 0;

  bool operator==(const Document&) const = default;
};

// Ordered collection of documents with unique ids.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents);

  // Appends a document, computing its word count. Throws DuplicateIdError.
  void add(Document doc);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }
  const Document& operator[](std::size_t i) const { return docs_[i]; }
  auto begin() const noexcept { return docs_.begin(); }
  auto end() const noexcept { return docs_.end(); }

  const Document* find(std::string_view id) const;

  bool operator==(const Corpus& other) const { return docs_ == other.docs_; }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { jsonl, csv };

CorpusFormat parse_corpus_format(std::string_view name);
// jsonl for .jsonl/.json, csv for .csv; throws otherwise.
CorpusFormat corpus_format_for(const std::filesystem::path& path);

// JSONL: one object per line with keys id, text, candidate_id and optional
// writer_id and meta (flat map of strings). CSV: header row with the same
// names; metadata columns are prefixed "meta_" and empty cells mean absent.
Corpus read_corpus(std::istream& in, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
void write_corpus(const Corpus& corpus, std::ostream& out, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format);

// True for code points with the Unicode White_Space property.
bool is_unicode_space(char32_t cp) noexcept;

// Maximal runs of non-whitespace (Unicode White_Space), in order.
std::vector<std::string_view> split_words(std::string_view text);
std::size_t word_count(std::string_view text);

// Sentences end at '.', '!' or '?' followed by whitespace or end of text.
// Returned sentences are trimmed; trailing text without a terminator is a
// final sentence.
std::vector<std::string_view> split_sentences(std::string_view text);

enum class ChunkUnit { word, sentence };

// Groups the unit sequence into consecutive chunks of max_units units (the
// last may be shorter), joining units with a single space. Empty text gives
// no chunks.
std::vector<std::string> chunk(std::string_view text, std::size_t max_units, ChunkUnit unit);

}  // namespace promptsent
