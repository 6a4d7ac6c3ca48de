// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "desk_corpus.hpp"
#include "oracles.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/message.hpp"
#include "patchrnn/patch.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn {
namespace {

std::vector<std::string> head(const MessageTokens& m) {
  return {m.tokens.begin(), m.tokens.begin() + static_cast<long>(m.valid_length())};
}

TEST(Message, NullCheckCommitSubject) {
  MessageTokens m = preprocess_message("ResetUri: Protect against NULL");
  ASSERT_EQ(m.tokens.size(), 200u);
  EXPECT_EQ(head(m), (std::vector<std::string>{"reseturi", "protect", "null"}));
  for (std::size_t i = 3; i < 200; ++i) EXPECT_EQ(m.tokens[i], "<pad>");
}

TEST(Message, EmptyIsAllPad) {
  MessageTokens m = preprocess_message("");
  EXPECT_EQ(m.tokens, std::vector<std::string>(200, "<pad>"));
  EXPECT_EQ(m.valid_length(), 0u);
}

TEST(Message, UrlAndNumberAreCleared) {
  EXPECT_FALSE(english_stopwords().contains("see"));
  MessageTokens m = preprocess_message("see https://example.com/fix 12345");
  EXPECT_EQ(head(m), (std::vector<std::string>{"see"}));
}

TEST(Message, StopwordListIsPinned) {
  const auto& words = english_stopwords();
  EXPECT_EQ(words.size(), 179u);
  for (const char* w : {"against", "the", "a", "don't", "mustn", "ourselves", "t"}) {
    EXPECT_TRUE(words.contains(w)) << w;
  }
}

TEST(Message, FooterLinesAndContinuationsAreRemoved) {
  const std::string msg =
      "Fix overflow\n\nSigned-off-by: Alice <alice@example.org>\n"
      "Cc: Bob <bob@example.org>,\n    Carol <carol@example.org>\nReviewed-By: Dan\n"
      "Tested-by: Eve\nAcked-by: Frank\nReported-by: Grace\nTrailing words here";
  const std::string cleared = clear_message(msg);
  EXPECT_EQ(cleared.find("alice"), std::string::npos);
  EXPECT_EQ(cleared.find("carol"), std::string::npos);
  EXPECT_EQ(cleared.find("frank"), std::string::npos);
  EXPECT_NE(cleared.find("trailing"), std::string::npos);
  EXPECT_EQ(message_words(msg), (std::vector<std::string>{"fix", "overflow", "trail", "word"}));
}

TEST(Message, NumbersWithSeparatorsAreStandalone) {
  EXPECT_EQ(clear_message("v 1.2.3 and 640x480 and 1,000 and 0x10"),
            "v  and  and  and 0x10");
}

TEST(Message, Tokenizer) {
  EXPECT_EQ(tokenize_words("don't use-after-free (really)!"),
            (std::vector<std::string>{"don't", "use-after-free", "(", "really", ")", "!"}));
  EXPECT_EQ(tokenize_words("mail me: a.b@example.com."),
            (std::vector<std::string>{"mail", "me", ":", "a.b@example.com", "."}));
  EXPECT_EQ(tokenize_words(":-) <3"), (std::vector<std::string>{":", "-", ")", "<", "3"}));
  EXPECT_TRUE(is_email("dev@embedthis.com"));
  EXPECT_FALSE(is_email("use-after-free"));
}

TEST(Message, EmailsAndLetterlessTokensAreDropped) {
  EXPECT_EQ(message_words("ping dev@embedthis.com --- 42 ... x86"),
            (std::vector<std::string>{"ping", "x86"}));
}

TEST(Message, StemsThatBreakTheOutputContractAreDropped) {
  EXPECT_EQ(porter_stem("12s"), "12");
  EXPECT_EQ(message_words("12s apples"), (std::vector<std::string>{"appl"}));
  EXPECT_EQ(porter_stem("thes"), "the");
  EXPECT_EQ(message_words("thes apples"), (std::vector<std::string>{"appl"}));
}

TEST(Message, TruncationKeepsHead) {
  std::string msg;
  for (int i = 0; i < 300; ++i) msg += "word" + std::string(1, static_cast<char>('a' + i % 26)) + " ";
  MessageTokens m = preprocess_message(msg);
  ASSERT_EQ(m.tokens.size(), 200u);
  EXPECT_EQ(m.tokens[0], "worda");
  EXPECT_EQ(m.valid_length(), 200u);
  EXPECT_EQ(preprocess_message(msg, 7).tokens.size(), 7u);
}

TEST(Porter, ReferenceBehaviour) {
  EXPECT_EQ(porter_stem("caresses"), "caress");
  EXPECT_EQ(porter_stem("ponies"), "poni");
  EXPECT_EQ(porter_stem("relational"), "relat");
  EXPECT_EQ(porter_stem("generalization"), "gener");
  EXPECT_EQ(porter_stem("hopefulness"), "hope");
  EXPECT_EQ(porter_stem("protect"), "protect");
  EXPECT_EQ(porter_stem("is"), "is");
  EXPECT_EQ(porter_stem(""), "");
}

// Canonical vocabulary and expected output, one word per line.
TEST(Porter, CanonicalVocabularyAgreement) {
  const auto voc = testing::text_lines(read_file(testing::data_path("porter/voc.txt")));
  const auto expected = testing::text_lines(read_file(testing::data_path("porter/output.txt")));
  ASSERT_EQ(voc.size(), expected.size());
  ASSERT_GT(voc.size(), 23000u);
  std::size_t agree = 0;
  std::vector<std::string> misses;
  for (std::size_t i = 0; i < voc.size(); ++i) {
    if (porter_stem(voc[i]) == expected[i]) {
      ++agree;
    } else if (misses.size() < 20) {
      misses.push_back(voc[i] + " -> " + porter_stem(voc[i]) + " (want " + expected[i] + ")");
    }
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(voc.size());
  RecordProperty("agreement", std::to_string(rate));
  std::string sample;
  for (const auto& m : misses) sample += m + "\n";
  EXPECT_GE(rate, 0.999) << sample;
}

std::set<std::string> desk_message_vocabulary(bool stem) {
  std::set<std::string> vocab;
  for (const auto& d : testing::desk_corpus(200, 17)) {
    PatchFile p = parse_patch(d.text);
    for (auto& w : message_words(p.message, {.remove_stopwords = true, .stem = stem})) {
      vocab.insert(w);
    }
  }
  return vocab;
}

TEST(Porter, IdempotentOnCorpusStems) {
  const auto stems = desk_message_vocabulary(true);
  ASSERT_GT(stems.size(), 20u);
  std::string moved;
  for (const std::string& s : stems) {
    if (porter_stem(s) != s) moved += s + " -> " + porter_stem(s) + "\n";
  }
  EXPECT_TRUE(moved.empty()) << moved;
}

TEST(Message, StemmingNeverGrowsVocabulary) {
  EXPECT_LE(desk_message_vocabulary(true).size(), desk_message_vocabulary(false).size());
}

TEST(Message, PurityAndDeterminismOnFuzz) {
  Rng rng(31);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      " \t\n.,:;!?'-_/@()[]<>\"#$%&*+=";
  const auto& stopwords = english_stopwords();
  for (int trial = 0; trial < 1000; ++trial) {
    std::string msg;
    for (std::size_t n = rng.below(300); n > 0; --n) msg += alphabet[rng.below(alphabet.size())];
    if (rng.bernoulli(0.2)) msg += "\nSigned-off-by: X <x@y.org>\nhttp://a.b/c 12 The AGAINST";
    const MessageTokens m = preprocess_message(msg);
    ASSERT_EQ(m.tokens.size(), 200u);
    EXPECT_EQ(m.tokens, preprocess_message(msg).tokens);
    for (std::size_t i = 0; i < m.valid_length(); ++i) {
      const std::string& t = m.tokens[i];
      EXPECT_TRUE(std::none_of(t.begin(), t.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
          << t;
      EXPECT_TRUE(std::any_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
          << t;
      EXPECT_FALSE(stopwords.contains(t)) << t;
    }
    for (std::size_t i = m.valid_length(); i < 200; ++i) EXPECT_EQ(m.tokens[i], "<pad>");
  }
}

}  // namespace
}  // namespace patchrnn
