// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace patchrnn {

/// Token kinds; the order is the one-hot layout used by the classifier.
enum class TokenKind {
  kKeyword = 0,
  kIdentifier = 1,
  kLiteral = 2,
  kPunctuation = 3,
  kComment = 4,
  kPad = 5,
};

inline constexpr std::size_t kTokenKindCount = 6;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnknownToken = "<unk>";

std::string_view to_string(TokenKind kind);

struct CodeToken {
  std::string text;
  TokenKind kind;

  bool operator==(const CodeToken&) const = default;
};

/// Lexed token plus the byte offset of its first character in the source
/// (before line-continuation splicing).
struct LocatedToken {
  CodeToken token;
  std::size_t offset;
};

bool is_keyword(std::string_view spelling);

/// Tokenizes C/C++ text without preprocessing. Never fails: bytes that start
/// no known token become single-character Punctuation tokens.
std::vector<CodeToken> lex(std::string_view source);

std::vector<LocatedToken> lex_located(std::string_view source);

/// Lexes lines joined with '\n' and reports, for each token, the index of
/// the line it starts on.
struct LineToken {
  CodeToken token;
  std::size_t line;
};
std::vector<LineToken> lex_lines(const std::vector<std::string>& lines);

}  // namespace patchrnn
