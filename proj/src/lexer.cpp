// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/lexer.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace patchrnn {

namespace {

const std::unordered_set<std::string_view>& keyword_table() {
  static const std::unordered_set<std::string_view> table = {
      // C99
      "auto", "break", "case", "char", "const", "continue", "default", "do",
      "double", "else", "enum", "extern", "float", "for", "goto", "if",
      "inline", "int", "long", "register", "restrict", "return", "short",
      "signed", "sizeof", "static", "struct", "switch", "typedef", "union",
      "unsigned", "void", "volatile", "while", "_Bool", "_Complex",
      "_Imaginary",
      // C++ core
      "class", "new", "delete", "template", "namespace", "public", "private",
      "protected", "virtual", "this", "try", "catch", "throw", "operator",
      "using", "typename", "bool", "true", "false", "nullptr", "const_cast",
      "static_cast", "dynamic_cast", "reinterpret_cast"};
  return table;
}

constexpr std::array<std::string_view, 5> kPunct3 = {"<<=", ">>=", "...",
                                                     "->*", "<=>"};
constexpr std::array<std::string_view, 22> kPunct2 = {
    "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", ".*", "##"};
constexpr std::string_view kPunct1 = "{}[]()<>;:,.?~!+-*/%^&|=#";

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::size_t utf8_length(unsigned char lead) {
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  if (lead >= 0xE0) return 3;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  return 1;
}

class Scanner {
 public:
  explicit Scanner(std::string_view source) {
    // Splice backslash-newline continuations, remembering original offsets.
    text_.reserve(source.size());
    origin_.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (source[i] == '\\') {
        if (i + 1 < source.size() && source[i + 1] == '\n') {
          ++i;
          continue;
        }
        if (i + 2 < source.size() && source[i + 1] == '\r' &&
            source[i + 2] == '\n') {
          i += 2;
          continue;
        }
      }
      text_ += source[i];
      origin_.push_back(i);
    }
  }

  std::vector<LocatedToken> run() {
    std::vector<LocatedToken> out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (is_space(c)) {
        ++pos_;
        continue;
      }
      const std::size_t start = pos_;
      TokenKind kind = scan_one();
      out.push_back(
          {{std::string(text_.substr(start, pos_ - start)), kind}, origin_[start]});
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  TokenKind scan_one() {
    const char c = peek();
    if (c == '/' && peek(1) == '/') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      return TokenKind::kComment;
    }
    if (c == '/' && peek(1) == '*') {
      std::size_t end = text_.find("*/", pos_ + 2);
      pos_ = end == std::string::npos ? text_.size() : end + 2;
      return TokenKind::kComment;
    }
    if (is_ident_start(c)) return scan_identifier();
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
      scan_number();
      return TokenKind::kLiteral;
    }
    if (c == '"' || c == '\'') {
      scan_quoted(c);
      return TokenKind::kLiteral;
    }
    for (std::string_view p : kPunct3) {
      if (text_.compare(pos_, p.size(), p) == 0) {
        pos_ += p.size();
        return TokenKind::kPunctuation;
      }
    }
    for (std::string_view p : kPunct2) {
      if (text_.compare(pos_, p.size(), p) == 0) {
        pos_ += p.size();
        return TokenKind::kPunctuation;
      }
    }
    if (kPunct1.find(c) != std::string_view::npos) {
      ++pos_;
      return TokenKind::kPunctuation;
    }
    pos_ = std::min(text_.size(),
                    pos_ + utf8_length(static_cast<unsigned char>(c)));
    return TokenKind::kPunctuation;
  }

  TokenKind scan_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string_view word(text_.data() + start, pos_ - start);
    const char next = peek();
    const bool string_prefix = word == "L" || word == "u" || word == "U" ||
                               word == "u8";
    const bool raw_prefix =
        word == "R" || word == "LR" || word == "uR" || word == "UR" ||
        word == "u8R";
    if (next == '"' && raw_prefix) {
      scan_raw_string();
      return TokenKind::kLiteral;
    }
    if ((next == '"' || next == '\'') && string_prefix) {
      scan_quoted(next);
      return TokenKind::kLiteral;
    }
    return is_keyword(word) ? TokenKind::kKeyword : TokenKind::kIdentifier;
  }

  void scan_number() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if ((c == '+' || c == '-') && pos_ > 0) {
        const char prev = text_[pos_ - 1];
        if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
          ++pos_;
          continue;
        }
        break;
      }
      if (c == '\'' && is_ident_char(peek(1))) {
        pos_ += 2;
        continue;
      }
      if (is_ident_char(c) || c == '.') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  // Ends at the closing quote, or before the newline if unterminated.
  void scan_quoted(char quote) {
    ++pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '\n') {
        pos_ += 2;
        continue;
      }
      if (c == '\n') return;
      ++pos_;
      if (c == quote) return;
    }
  }

  void scan_raw_string() {
    const std::size_t open = pos_;  // at '"'
    const std::size_t paren = text_.find('(', open + 1);
    if (paren == std::string::npos || paren - open - 1 > 16) {
      scan_quoted('"');
      return;
    }
    const std::string closing =
        ")" + text_.substr(open + 1, paren - open - 1) + "\"";
    const std::size_t end = text_.find(closing, paren + 1);
    pos_ = end == std::string::npos ? text_.size() : end + closing.size();
  }

  std::string text_;
  std::vector<std::size_t> origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kKeyword:
      return "Keyword";
    case TokenKind::kIdentifier:
      return "Identifier";
    case TokenKind::kLiteral:
      return "Literal";
    case TokenKind::kPunctuation:
      return "Punctuation";
    case TokenKind::kComment:
      return "Comment";
    case TokenKind::kPad:
      return "Pad";
  }
  return "?";
}

bool is_keyword(std::string_view spelling) {
  return keyword_table().contains(spelling);
}

std::vector<LocatedToken> lex_located(std::string_view source) {
  return Scanner(source).run();
}

std::vector<CodeToken> lex(std::string_view source) {
  std::vector<CodeToken> out;
  for (LocatedToken& t : lex_located(source)) out.push_back(std::move(t.token));
  return out;
}

std::vector<LineToken> lex_lines(const std::vector<std::string>& lines) {
  std::string joined;
  std::vector<std::size_t> line_starts;
  for (const std::string& line : lines) {
    line_starts.push_back(joined.size());
    joined += line;
    joined += '\n';
  }
  std::vector<LineToken> out;
  for (LocatedToken& t : lex_located(joined)) {
    auto it = std::upper_bound(line_starts.begin(), line_starts.end(), t.offset);
    const auto line = static_cast<std::size_t>(it - line_starts.begin()) - 1;
    out.push_back({std::move(t.token), line});
  }
  return out;
}

}  // namespace patchrnn
