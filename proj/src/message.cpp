// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/message.hpp"

#include <algorithm>
#include <regex>

#include "patchrnn/io.hpp"
#include "patchrnn/lexer.hpp"

namespace patchrnn {

namespace {

#include "stopwords_data.inc"  // kStopwordData: data/english_stopwords.txt

constexpr std::string_view kFooterKeys[] = {
    "signed-off-by:", "reviewed-by:", "cc:",
    "reported-by:",   "tested-by:",   "acked-by:"};

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || u >= 0x80;
}

std::size_t indentation(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

bool is_footer(std::string_view line) {
  line.remove_prefix(indentation(line));
  return std::any_of(std::begin(kFooterKeys), std::end(kFooterKeys),
                     [&](std::string_view key) {
                       return line.substr(0, key.size()) == key;
                     });
}

bool has_letter(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

const std::regex& url_pattern() {
  static const std::regex re(R"((?:https?|ftp|git|file)://\S+|www\.\S+)");
  return re;
}

const std::regex& number_pattern() {
  static const std::regex re(R"([0-9]+(?:[.,/x][0-9]+)*)");
  return re;
}

const std::regex& email_pattern() {
  static const std::regex re(R"([a-z0-9._%+\-]+@[a-z0-9\-]+(?:\.[a-z0-9\-]+)*\.[a-z]{2,})",
                             std::regex::icase);
  return re;
}

void tokenize_plain(std::string_view piece, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < piece.size()) {
    if (!is_word_char(piece[i])) {
      out.emplace_back(1, piece[i]);
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < piece.size()) {
      if (is_word_char(piece[i])) {
        ++i;
      } else if ((piece[i] == '\'' || piece[i] == '-') && i + 1 < piece.size() &&
                 is_word_char(piece[i + 1])) {
        i += 2;
      } else {
        break;
      }
    }
    out.emplace_back(piece.substr(start, i - start));
  }
}

}  // namespace

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> set;
    for (std::string_view line : split_lines(kStopwordData)) {
      if (!line.empty()) set.emplace(line);
    }
    return set;
  }();
  return words;
}

std::string clear_message(std::string_view message) {
  std::string lowered(message);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });

  std::string kept;
  bool first = true;
  bool in_footer = false;
  std::size_t footer_indent = 0;
  for (std::string_view line : split(lowered, '\n')) {
    if (is_footer(line)) {
      in_footer = true;
      footer_indent = indentation(line);
      continue;
    }
    if (in_footer && indentation(line) > footer_indent &&
        indentation(line) < line.size()) {
      continue;
    }
    in_footer = false;
    if (!first) kept += '\n';
    first = false;
    kept.append(line);
  }

  kept = std::regex_replace(kept, url_pattern(), " ");

  std::string out;
  std::size_t i = 0;
  while (i < kept.size()) {
    if (is_ws(kept[i])) {
      out += kept[i++];
      continue;
    }
    std::size_t end = i;
    while (end < kept.size() && !is_ws(kept[end])) ++end;
    const std::string piece = kept.substr(i, end - i);
    const bool hex = piece.size() > 2 && piece[0] == '0' && piece[1] == 'x';
    if (hex || !std::regex_match(piece, number_pattern())) out += piece;
    i = end;
  }
  return out;
}

bool is_email(std::string_view token) {
  return std::regex_match(token.begin(), token.end(), email_pattern());
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_ws(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_ws(text[end])) ++end;
    std::string_view piece = text.substr(i, end - i);
    std::match_results<std::string_view::const_iterator> match;
    if (std::regex_search(piece.begin(), piece.end(), match, email_pattern())) {
      const auto pos = static_cast<std::size_t>(match.position(0));
      const auto len = static_cast<std::size_t>(match.length(0));
      tokenize_plain(piece.substr(0, pos), out);
      out.emplace_back(piece.substr(pos, len));
      tokenize_plain(piece.substr(pos + len), out);
    } else {
      tokenize_plain(piece, out);
    }
    i = end;
  }
  return out;
}

std::vector<std::string> message_words(std::string_view message,
                                       const MessageOptions& options) {
  const auto& stopwords = english_stopwords();
  std::vector<std::string> words;
  for (std::string& token : tokenize_words(clear_message(message))) {
    if (!has_letter(token) || is_email(token)) continue;
    if (options.remove_stopwords && stopwords.contains(token)) continue;
    std::string word = options.stem ? porter_stem(token) : std::move(token);
    // "12s" stems to "12" and "thes" to "the".
    if (!has_letter(word)) continue;
    if (options.remove_stopwords && stopwords.contains(word)) continue;
    words.push_back(std::move(word));
  }
  return words;
}

std::size_t MessageTokens::valid_length() const {
  std::size_t n = 0;
  while (n < tokens.size() && tokens[n] != kPadToken) ++n;
  return n;
}

MessageTokens preprocess_message(std::string_view message, std::size_t target) {
  MessageTokens out;
  out.tokens = message_words(message);
  out.tokens.resize(target, std::string(kPadToken));
  return out;
}

}  // namespace patchrnn
