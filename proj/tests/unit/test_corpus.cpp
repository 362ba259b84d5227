#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "promptsent/corpus.hpp"
#include "promptsent/errors.hpp"

using namespace promptsent;

namespace {

// Independent word counter: whitespace per the White_Space list, decoded
// by hand from UTF-8.
std::size_t count_words_oracle(const std::u32string& text) {
  const std::u32string spaces = U"\t\n\v\f\r \u0085\u00A0\u1680\u2000\u2001\u2002\u2003\u2004\u2005"
                                U"\u2006\u2007\u2008\u2009\u200A\u2028\u2029\u202F\u205F\u3000";
  std::size_t n = 0;
  bool in_word = false;
  for (char32_t c : text) {
    const bool space = spaces.find(c) != std::u32string::npos;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string to_utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

}  // namespace

TEST(WordCount, Examples) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("Dear colleagues,"), 2u);
  EXPECT_EQ(word_count("a  b\nc"), 3u);
}

TEST(WordCount, MatchesOracleOnRandomUnicode) {
  const std::u32string alphabet = U"ab\u00E9\u4E2D \t\n\u00A0\u2003\u3000\u200B.,";
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string s;
    const auto len = gen::below(rng, 40);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[gen::below(rng, alphabet.size())];
    EXPECT_EQ(word_count(to_utf8(s)), count_words_oracle(s));
  }
}

TEST(Chunk, WordModeSizes) {
  const auto chunks = chunk("w1 w2 w3 w4 w5 w6 w7 w8 w9 w10", 4, ChunkUnit::word);
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(word_count(chunks[0]), 4u);
  EXPECT_EQ(word_count(chunks[1]), 4u);
  EXPECT_EQ(word_count(chunks[2]), 2u);
  EXPECT_EQ(chunks[2], "w9 w10");
}

TEST(Chunk, SentenceMode) {
  const auto chunks = chunk("A. B! C?", 1, ChunkUnit::sentence);
  EXPECT_EQ(chunks, (std::vector<std::string>{"A.", "B!", "C?"}));
}

TEST(Chunk, ShortTextIsOneChunk) {
  EXPECT_EQ(chunk("one two", 10, ChunkUnit::word), (std::vector<std::string>{"one two"}));
  EXPECT_TRUE(chunk("", 3, ChunkUnit::word).empty());
}

TEST(Chunk, ConcatenationPreservesWords) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto text = gen::letter_text(rng, 1 + gen::below(rng, 8));
    const std::size_t k = 1 + gen::below(rng, 20);
    std::size_t total = 0;
    const auto parts = chunk(text, k, ChunkUnit::word);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto n = word_count(parts[i]);
      total += n;
      if (i + 1 < parts.size()) EXPECT_EQ(n, k);
      else EXPECT_LE(n, k);
    }
    EXPECT_EQ(total, word_count(text));
  }
}

TEST(Sentences, TrailingTextWithoutTerminator) {
  const auto s = split_sentences("First one. Then 3.5 percent rose  and more");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], "First one.");
  EXPECT_EQ(s[1], "Then 3.5 percent rose  and more");
}

TEST(CorpusIo, ThreeRecords) {
  std::istringstream in(
      R"({"id":"L1","text":"a b","candidate_id":"c1"}
{"id":"L2","text":"c","candidate_id":"c1","writer_id":"w","meta":{"sex":"female"}}
{"id":"L3","text":"","candidate_id":"c2"}
)");
  const auto c = read_corpus(in, CorpusFormat::jsonl);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].word_count, 2u);
  EXPECT_EQ(c[1].meta.at("sex"), "female");
  EXPECT_EQ(c[1].writer_id, "w");
  EXPECT_FALSE(c[0].writer_id.has_value());
  EXPECT_NE(c.find("L3"), nullptr);
  EXPECT_EQ(c.find("L9"), nullptr);
}

TEST(CorpusIo, DuplicateIdRejected) {
  std::istringstream in(
      "{\"id\":\"L1\",\"text\":\"a\",\"candidate_id\":\"c\"}\n{\"id\":\"L1\",\"text\":\"b\",\"candidate_id\":\"c\"}\n");
  try {
    read_corpus(in, CorpusFormat::jsonl);
    FAIL() << "expected DuplicateIdError";
  } catch (const DuplicateIdError& e) {
    EXPECT_EQ(e.id(), "L1");
  }
}

TEST(CorpusIo, EmptyFile) {
  std::istringstream in("");
  EXPECT_EQ(read_corpus(in, CorpusFormat::jsonl).size(), 0u);
  std::istringstream csv_in("");
  EXPECT_EQ(read_corpus(csv_in, CorpusFormat::csv).size(), 0u);
}

TEST(CorpusIo, MalformedLineIsParseError) {
  std::istringstream in("{\"id\":\"L1\",\"text\":\"a\",\"candidate_id\":\"c\"}\n{not json}\n");
  try {
    read_corpus(in, CorpusFormat::jsonl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(CorpusIo, RoundTripBothFormats) {
  const auto corpus = gen::synthetic_corpus(12, 5);
  for (auto format : {CorpusFormat::jsonl, CorpusFormat::csv}) {
    std::stringstream buf;
    write_corpus(corpus, buf, format);
    const auto back = read_corpus(buf, format);
    EXPECT_EQ(back, corpus);
  }
}

TEST(CorpusIo, FormatFromExtension) {
  EXPECT_EQ(corpus_format_for("x/letters.jsonl"), CorpusFormat::jsonl);
  EXPECT_EQ(corpus_format_for("letters.csv"), CorpusFormat::csv);
  EXPECT_THROW(corpus_format_for("letters.txt"), InvalidArgument);
}

TEST(CorpusIo, BundledCorpus) {
  const auto c = load_corpus(PROMPTSENT_DATA_DIR "/corpus/synthetic_letters.jsonl", CorpusFormat::jsonl);
  EXPECT_EQ(c.size(), 20u);
}
