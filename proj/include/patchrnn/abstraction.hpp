// SPDX-License-Identifier: Apache-2.0
//
// Identifier/literal abstraction of lexed code and fixed-length
// normalization of the resulting sequences.
#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "patchrnn/lexer.hpp"
#include "patchrnn/patch.hpp"

namespace patchrnn {

inline constexpr std::size_t kDefaultCodeLength = 1100;
inline constexpr std::string_view kStringLiteralToken = "LITERAL";

/// A code token tagged with the diff type of the line it came from.
struct DiffToken {
  CodeToken token;
  int diff_type = 0;
};

struct AbstractToken {
  std::string text;
  TokenKind kind;
  int diff_type = 0;

  bool is_pad() const { return kind == TokenKind::kPad; }
  bool operator==(const AbstractToken&) const = default;
};

AbstractToken pad_token();

/// Identifier spelling -> VARn / FUNCn, numbered per class from 0 in order of
/// first occurrence. One table covers both sides of one patch.
class AbstractionTable {
 public:
  /// Returns the symbol for `spelling`, creating a VARn or FUNCn entry on
  /// first sight. Later calls reuse the first assignment.
  const std::string& symbol_for(const std::string& spelling, bool call_position);

  std::size_t size() const { return symbols_.size(); }
  std::size_t next_var() const { return next_var_; }
  std::size_t next_func() const { return next_func_; }
  const std::unordered_map<std::string, std::string>& entries() const {
    return symbols_;
  }

 private:
  std::unordered_map<std::string, std::string> symbols_;
  std::size_t next_var_ = 0;
  std::size_t next_func_ = 0;
};

/// Keywords/punctuation pass through; identifiers become VARn/FUNCn (FUNCn
/// when the next non-comment token is "("); string and character literals
/// become LITERAL; numeric literals are kept; comments are dropped.
std::vector<AbstractToken> abstract_tokens(const std::vector<DiffToken>& tokens,
                                           AbstractionTable& table);

/// Pads with "<pad>" or truncates (keeping the head) to exactly `target`.
std::vector<AbstractToken> normalize_length(std::vector<AbstractToken> tokens,
                                            std::size_t target = kDefaultCodeLength);

/// Lexes one side of a reconstructed patch; every token inherits the diff type
/// of the line it starts on.
std::vector<DiffToken> lex_side(const std::vector<ReconstructedLine>& lines);

struct AbstractedPair {
  std::vector<AbstractToken> unpatched;
  std::vector<AbstractToken> patched;
};

/// Lex + abstract both sides with one shared table (unpatched side first),
/// without length normalization.
AbstractedPair abstract_pair(const ReconstructedPair& pair);

/// Number of leading non-pad tokens.
std::size_t valid_length(const std::vector<AbstractToken>& tokens);

}  // namespace patchrnn
