// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/abstraction.hpp"

namespace patchrnn {

namespace {

bool is_numeric_literal(const std::string& text) {
  return !text.empty() &&
         ((text[0] >= '0' && text[0] <= '9') || text[0] == '.');
}

}  // namespace

AbstractToken pad_token() {
  return {std::string(kPadToken), TokenKind::kPad, 0};
}

const std::string& AbstractionTable::symbol_for(const std::string& spelling,
                                                bool call_position) {
  auto it = symbols_.find(spelling);
  if (it != symbols_.end()) return it->second;
  std::string symbol = call_position ? "FUNC" + std::to_string(next_func_++)
                                     : "VAR" + std::to_string(next_var_++);
  return symbols_.emplace(spelling, std::move(symbol)).first->second;
}

std::vector<AbstractToken> abstract_tokens(const std::vector<DiffToken>& tokens,
                                           AbstractionTable& table) {
  std::vector<AbstractToken> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const CodeToken& tok = tokens[i].token;
    const int diff_type = tokens[i].diff_type;
    switch (tok.kind) {
      case TokenKind::kComment:
        break;
      case TokenKind::kIdentifier: {
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].token.kind == TokenKind::kComment) {
          ++j;
        }
        const bool call = j < tokens.size() &&
                          tokens[j].token.kind == TokenKind::kPunctuation &&
                          tokens[j].token.text == "(";
        out.push_back({table.symbol_for(tok.text, call), tok.kind, diff_type});
        break;
      }
      case TokenKind::kLiteral:
        out.push_back({is_numeric_literal(tok.text)
                           ? tok.text
                           : std::string(kStringLiteralToken),
                       tok.kind, diff_type});
        break;
      case TokenKind::kPad:
        out.push_back(pad_token());
        break;
      default:
        out.push_back({tok.text, tok.kind, diff_type});
        break;
    }
  }
  return out;
}

std::vector<AbstractToken> normalize_length(std::vector<AbstractToken> tokens,
                                            std::size_t target) {
  if (tokens.size() > target) {
    tokens.resize(target);
  } else {
    tokens.resize(target, pad_token());
  }
  return tokens;
}

std::vector<DiffToken> lex_side(const std::vector<ReconstructedLine>& lines) {
  std::vector<std::string> text;
  text.reserve(lines.size());
  for (const ReconstructedLine& line : lines) text.push_back(line.content);
  std::vector<DiffToken> out;
  for (LineToken& t : lex_lines(text)) {
    out.push_back({std::move(t.token), lines[t.line].diff_type});
  }
  return out;
}

AbstractedPair abstract_pair(const ReconstructedPair& pair) {
  AbstractionTable table;
  AbstractedPair out;
  out.unpatched = abstract_tokens(lex_side(pair.unpatched), table);
  out.patched = abstract_tokens(lex_side(pair.patched), table);
  return out;
}

std::size_t valid_length(const std::vector<AbstractToken>& tokens) {
  std::size_t n = 0;
  while (n < tokens.size() && !tokens[n].is_pad()) ++n;
  return n;
}

}  // namespace patchrnn
