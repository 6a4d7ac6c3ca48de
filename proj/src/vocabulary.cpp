// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/vocabulary.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "patchrnn/errors.hpp"
#include "patchrnn/io.hpp"
#include "patchrnn/lexer.hpp"

namespace patchrnn {

Vocabulary::Vocabulary() {
  push(std::string(kPadToken), 0);
  push(std::string(kUnknownToken), 0);
}

void Vocabulary::push(std::string token, std::uint64_t count) {
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& sequence : corpus) {
    for (const std::string& token : sequence) ++counts[token];
  }
  Vocabulary vocab;
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  for (auto& [token, count] : counts) {
    if (token == kPadToken) {
      vocab.counts_[kPadIndex] = count;
    } else if (token == kUnknownToken) {
      vocab.counts_[kUnknownIndex] = count;
    } else if (count >= min_count) {
      ranked.emplace_back(token, count);
    }
  }
  // std::map iteration is already lexicographic, so a stable sort on count
  // gives the tie-break for free.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (auto& [token, count] : ranked) vocab.push(std::move(token), count);
  return vocab;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 2 || tokens[kPadIndex] != kPadToken ||
      tokens[kUnknownIndex] != kUnknownToken) {
    throw Error("vocabulary must start with <pad> and <unk>");
  }
  Vocabulary vocab;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (vocab.find(tokens[i])) throw Error("duplicate token: " + tokens[i]);
    vocab.push(tokens[i], 0);
  }
  return vocab;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  return find(token).value_or(kUnknownIndex);
}

std::string Vocabulary::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(counts_[i]);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_text(std::string_view text) {
  Vocabulary vocab;
  vocab.tokens_.clear();
  vocab.counts_.clear();
  vocab.index_.clear();
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    auto fields = split(line, '\t');
    std::size_t index = 0;
    std::uint64_t count = 0;
    if (fields.size() != 3 ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                        index)
                .ec != std::errc() ||
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(),
                        count)
                .ec != std::errc() ||
        index != line_no) {
      throw Error("bad vocabulary line " + std::to_string(line_no + 1));
    }
    vocab.push(std::string(fields[0]), count);
    ++line_no;
  }
  if (vocab.size() < 2 || vocab.token(kPadIndex) != kPadToken ||
      vocab.token(kUnknownIndex) != kUnknownToken) {
    throw Error("vocabulary must start with <pad> and <unk>");
  }
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  write_file(path, to_text());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return from_text(read_file(path));
}

}  // namespace patchrnn
