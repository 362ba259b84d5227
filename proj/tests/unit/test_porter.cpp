#include <gtest/gtest.h>

#include <string>
#include <utility>
#include <vector>

#include "promptsent/lexical.hpp"

using promptsent::porter_stem;

// Reference stems recorded from NLTK's PorterStemmer in ORIGINAL_ALGORITHM
// mode (all words longer than two letters).
const std::vector<std::pair<std::string, std::string>> kVectors = {
    {"caresses", "caress"},
    {"ponies", "poni"},
    {"ties", "ti"},
    {"caress", "caress"},
    {"cats", "cat"},
    {"feed", "feed"},
    {"agreed", "agre"},
    {"plastered", "plaster"},
    {"bled", "bled"},
    {"motoring", "motor"},
    {"sing", "sing"},
    {"conflated", "conflat"},
    {"troubled", "troubl"},
    {"sized", "size"},
    {"hopping", "hop"},
    {"tanned", "tan"},
    {"falling", "fall"},
    {"hissing", "hiss"},
    {"fizzed", "fizz"},
    {"failing", "fail"},
    {"filing", "file"},
    {"happy", "happi"},
    {"sky", "sky"},
    {"relational", "relat"},
    {"conditional", "condit"},
    {"rational", "ration"},
    {"valenci", "valenc"},
    {"hesitanci", "hesit"},
    {"digitizer", "digit"},
    {"conformabli", "conform"},
    {"radicalli", "radic"},
    {"differentli", "differ"},
    {"vileli", "vile"},
    {"analogousli", "analog"},
    {"vietnamization", "vietnam"},
    {"predication", "predic"},
    {"operator", "oper"},
    {"feudalism", "feudal"},
    {"decisiveness", "decis"},
    {"hopefulness", "hope"},
    {"callousness", "callous"},
    {"formaliti", "formal"},
    {"sensitiviti", "sensit"},
    {"sensibiliti", "sensibl"},
    {"triplicate", "triplic"},
    {"formative", "form"},
    {"formalize", "formal"},
    {"electriciti", "electr"},
    {"electrical", "electr"},
    {"hopeful", "hope"},
    {"goodness", "good"},
    {"revival", "reviv"},
    {"allowance", "allow"},
    {"inference", "infer"},
    {"airliner", "airlin"},
    {"gyroscopic", "gyroscop"},
    {"adjustable", "adjust"},
    {"defensible", "defens"},
    {"irritant", "irrit"},
    {"replacement", "replac"},
    {"adjustment", "adjust"},
    {"dependent", "depend"},
    {"adoption", "adopt"},
    {"homologou", "homolog"},
    {"communism", "commun"},
    {"activate", "activ"},
    {"angulariti", "angular"},
    {"homologous", "homolog"},
    {"effective", "effect"},
    {"bowdlerize", "bowdler"},
    {"probate", "probat"},
    {"rate", "rate"},
    {"cease", "ceas"},
    {"controll", "control"},
    {"roll", "roll"},
    {"generalization", "gener"},
    {"oscillators", "oscil"},
    {"excellent", "excel"},
    {"outstanding", "outstand"},
    {"exceptional", "except"},
    {"brilliant", "brilliant"},
    {"remarkable", "remark"},
    {"impressive", "impress"},
    {"disappointing", "disappoint"},
    {"mediocre", "mediocr"},
    {"talented", "talent"},
    {"creativity", "creativ"},
    {"research", "research"},
    {"ability", "abil"},
    {"abilities", "abil"},
    {"generously", "gener"},
    {"university", "univers"},
    {"universities", "univers"},
    {"agreement", "agreement"},
    {"yes", "ye"}};

TEST(Porter, ReferenceVectors) {
  for (const auto& [word, stem] : kVectors) EXPECT_EQ(porter_stem(word), stem) << word;
}

TEST(Porter, ShortAndNonAlphabeticWordsPassThrough) {
  EXPECT_EQ(porter_stem("is"), "is");
  EXPECT_EQ(porter_stem("a"), "a");
  EXPECT_EQ(porter_stem(""), "");
  EXPECT_EQ(porter_stem("covid19"), "covid19");
  EXPECT_EQ(porter_stem("caf\xC3\xA9s"), "caf\xC3\xA9s");
}

TEST(Porter, RestemmingNeverGrows) {
  for (const auto& [word, stem] : kVectors) {
    const auto twice = porter_stem(stem);
    EXPECT_LE(twice.size(), stem.size()) << word;
  }
}

