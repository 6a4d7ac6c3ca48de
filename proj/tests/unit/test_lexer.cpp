// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "oracles.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/lexer.hpp"
#include "patchrnn/patch.hpp"
#include "patchrnn/rng.hpp"

namespace patchrnn {
namespace {

using K = TokenKind;

std::vector<K> kinds(const std::vector<CodeToken>& tokens) {
  std::vector<K> out;
  for (const auto& t : tokens) out.push_back(t.kind);
  return out;
}

bool has(const std::vector<CodeToken>& tokens, std::string_view text, K kind) {
  return std::find(tokens.begin(), tokens.end(), CodeToken{std::string(text), kind}) !=
         tokens.end();
}

std::string side_text(const std::vector<ReconstructedLine>& side) {
  std::string out;
  for (const auto& l : side) out += l.content + "\n";
  return out;
}

TEST(Lexer, EqualityIsOneToken) {
  auto t = lex("uri == NULL");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], (CodeToken{"uri", K::kIdentifier}));
  EXPECT_EQ(t[1], (CodeToken{"==", K::kPunctuation}));
  EXPECT_EQ(t[2], (CodeToken{"NULL", K::kIdentifier}));
}

TEST(Lexer, IfStatementKinds) {
  EXPECT_EQ(kinds(lex("if (uri == NULL) { return; }")),
            (std::vector<K>{K::kKeyword, K::kPunctuation, K::kIdentifier,
                            K::kPunctuation, K::kIdentifier, K::kPunctuation,
                            K::kPunctuation, K::kKeyword, K::kPunctuation,
                            K::kPunctuation}));
}

TEST(Lexer, MemsetLine) {
  auto t = lex("memset(uri, 0, sizeof(URI_TYPE(Uri)));");
  EXPECT_TRUE(has(t, "0", K::kLiteral));
  EXPECT_TRUE(has(t, "sizeof", K::kKeyword));
  EXPECT_TRUE(has(t, "URI_TYPE", K::kIdentifier));
}

TEST(Lexer, CommentAndString) {
  auto t = lex("x /* note */ = \"abc\"");
  EXPECT_EQ(t, (std::vector<CodeToken>{{"x", K::kIdentifier},
                                       {"/* note */", K::kComment},
                                       {"=", K::kPunctuation},
                                       {"\"abc\"", K::kLiteral}}));
}

TEST(Lexer, MultiCharacterOperatorsStayWhole) {
  for (const char* op : {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "->", "++",
                         "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=",
                         ">>=", "::", "...", "->*", ".*", "##", "<=>"}) {
    auto t = lex(op);
    ASSERT_EQ(t.size(), 1u) << op;
    EXPECT_EQ(t[0], (CodeToken{op, K::kPunctuation}));
  }
}

TEST(Lexer, MaximalMunchInContext) {
  auto t = lex("a<<=b->c++");
  EXPECT_EQ(t, (std::vector<CodeToken>{{"a", K::kIdentifier},
                                       {"<<=", K::kPunctuation},
                                       {"b", K::kIdentifier},
                                       {"->", K::kPunctuation},
                                       {"c", K::kIdentifier},
                                       {"++", K::kPunctuation}}));
}

TEST(Lexer, Literals) {
  for (const char* lit : {"0", "0x1F", "10UL", "3.14f", "1e-5", ".5", "0b101", "1'000",
                          "'a'", "'\\n'", "L\"wide\"", "u8\"x\"", "\"a\\\"b\"",
                          "R\"(raw \" text)\""}) {
    auto t = lex(lit);
    ASSERT_EQ(t.size(), 1u) << lit;
    EXPECT_EQ(t[0].kind, K::kLiteral) << lit;
    EXPECT_EQ(t[0].text, lit);
  }
  auto adjacent = lex("\"a\" \"b\"");
  EXPECT_EQ(adjacent.size(), 2u);
}

TEST(Lexer, KeywordSet) {
  for (const char* k : {"int", "sizeof", "return", "_Bool", "restrict", "class",
                        "nullptr", "true", "false", "reinterpret_cast", "typename"}) {
    EXPECT_TRUE(is_keyword(k)) << k;
    EXPECT_EQ(lex(k)[0].kind, K::kKeyword) << k;
  }
  for (const char* k : {"NULL", "size_t", "main", "ifdef", "endif", "override"}) {
    EXPECT_FALSE(is_keyword(k)) << k;
  }
}

TEST(Lexer, PreprocessorDirectives) {
  auto t = lex("#ifdef SIGPIPE\n#endif");
  EXPECT_EQ(t, (std::vector<CodeToken>{{"#", K::kPunctuation},
                                       {"ifdef", K::kIdentifier},
                                       {"SIGPIPE", K::kIdentifier},
                                       {"#", K::kPunctuation},
                                       {"endif", K::kIdentifier}}));
  auto t2 = lex("#if ME_UNIX_LIKE");
  EXPECT_EQ(t2[1], (CodeToken{"if", K::kKeyword}));
}

TEST(Lexer, Comments) {
  auto t = lex("a // tail\nb /* open");
  EXPECT_EQ(t, (std::vector<CodeToken>{{"a", K::kIdentifier},
                                       {"// tail", K::kComment},
                                       {"b", K::kIdentifier},
                                       {"/* open", K::kComment}}));
}

TEST(Lexer, LineContinuationIsSpliced) {
  auto t = lex("#define X \\\n  foo");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[3].text, "foo");
  auto joined = lex("ab\\\ncd");
  ASSERT_EQ(joined.size(), 1u);
  EXPECT_EQ(joined[0].text, "abcd");
  auto located = lex_located("x\\\ny z");
  EXPECT_EQ(located[0].token.text, "xy");
  EXPECT_EQ(located[1].offset, 5u);
}

TEST(Lexer, StrayBytesBecomePunctuation) {
  auto t = lex("a @ $ `");
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(t[i].kind, K::kPunctuation);
  auto u = lex("\xC3\xA9");
  ASSERT_EQ(u.size(), 1u);
  EXPECT_EQ(u[0].text, "\xC3\xA9");
}

TEST(Lexer, LexLinesReportsStartingLine) {
  auto t = lex_lines({"int a;", "/* x", "y */ b"});
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[0].line, 0u);
  EXPECT_EQ(t[3].token.kind, K::kComment);
  EXPECT_EQ(t[3].line, 1u);
  EXPECT_EQ(t[4].line, 2u);
}

TEST(Lexer, FixtureCommitsContainExpectedTokens) {
  for (int n : {1, 2}) {
    PatchFile p = parse_patch(read_file(
        testing::data_path(n == 1 ? "commits/reseturi_null.patch" : "commits/sigkill.patch")));
    ReconstructedPair pair = reconstruct(p);
    auto before = lex(side_text(pair.unpatched));
    auto after = lex(side_text(pair.patched));
    EXPECT_FALSE(before.empty());
    EXPECT_FALSE(after.empty());
    if (n == 1) {
      EXPECT_TRUE(has(after, "==", K::kPunctuation));
      EXPECT_TRUE(has(after, "uri", K::kIdentifier));
      EXPECT_TRUE(has(after, "NULL", K::kIdentifier));
      EXPECT_TRUE(has(after, "if", K::kKeyword));
      EXPECT_TRUE(has(after, "0", K::kLiteral));
      EXPECT_TRUE(has(after, "sizeof", K::kKeyword));
      EXPECT_TRUE(has(after, "URI_TYPE", K::kIdentifier));
      EXPECT_FALSE(has(before, "==", K::kPunctuation));
    } else {
      EXPECT_TRUE(has(before, "SIGKILL", K::kIdentifier));
      EXPECT_FALSE(has(after, "SIGKILL", K::kIdentifier));
      EXPECT_TRUE(has(before, "#", K::kPunctuation));
      EXPECT_TRUE(has(before, "ifdef", K::kIdentifier));
    }
  }
}

constexpr std::array kPieces = {
    "foo",  "bar_1", "int",   "return", "sizeof", "0",   "0x10",   "42UL", "3.5e+2",
    "\"s\"", "'c'",  "==",    "!=",     "<<=",    "->",  "++",     "(",    ")",
    "{",    "}",     ";",     ",",      "/* c */", "#",  "...",    "::",   "&&",
    "*",    "&",     "-",     "L\"w\"", "?",      ":",   "// eol\n"};

std::string random_source(Rng& rng) {
  std::string s;
  const std::size_t n = 1 + rng.below(40);
  for (std::size_t i = 0; i < n; ++i) {
    s += kPieces[rng.below(kPieces.size())];
    s += rng.bernoulli(0.2) ? "\n" : (rng.bernoulli(0.5) ? " " : "\t");
  }
  return s;
}

TEST(Lexer, WhitespaceNormalizationKeepsKinds) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string src = random_source(rng);
    auto first = lex(src);
    std::string joined;
    for (const auto& t : first) {
      joined += t.text;
      joined += (t.kind == K::kComment && t.text.rfind("//", 0) == 0) ? "\n" : " ";
    }
    EXPECT_EQ(kinds(lex(joined)), kinds(first)) << src;
  }
}

TEST(Lexer, CoversAllNonWhitespace) {
  Rng rng(6);
  auto strip = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\v' && c != '\f') out += c;
    }
    return out;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string src = random_source(rng);
    std::string concat;
    for (const auto& t : lex(src)) concat += t.text;
    EXPECT_EQ(strip(concat), strip(src));
  }
}

TEST(Lexer, TotalOnRandomBytes) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string bytes(rng.below(200), '\0');
    for (char& c : bytes) c = static_cast<char>(rng.below(256));
    std::vector<CodeToken> t;
    ASSERT_NO_THROW(t = lex(bytes));
    for (const auto& tok : t) {
      EXPECT_FALSE(tok.text.empty());
      EXPECT_NE(tok.kind, K::kPad);
    }
  }
}

TEST(Lexer, SameSpellingSameContextSameKind) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string src = random_source(rng);
    EXPECT_EQ(lex(src), lex(src));
    EXPECT_EQ(lex(src + " " + src).size(), 2 * lex(src + " ").size());
  }
}

}  // namespace
}  // namespace patchrnn
