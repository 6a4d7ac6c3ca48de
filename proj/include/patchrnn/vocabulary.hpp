// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace patchrnn {

/// Ordered token -> index map. "<pad>" is always 0 and "<unk>" always 1; the
/// remaining tokens follow by descending frequency, ties broken
/// lexicographically.
class Vocabulary {
 public:
  static constexpr std::size_t kPadIndex = 0;
  static constexpr std::size_t kUnknownIndex = 1;

  Vocabulary();

  /// Tokens seen fewer than `min_count` times are left out (they map to
  /// "<unk>" on lookup).
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                          std::size_t min_count = 1);

  /// Vocabulary with exactly these tokens in this order (frequencies 0).
  /// The list must start with "<pad>", "<unk>".
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return tokens_.size(); }
  std::optional<std::size_t> find(std::string_view token) const;
  /// Index of `token`, or kUnknownIndex.
  std::size_t index_of(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  std::uint64_t frequency(std::size_t index) const { return counts_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  /// `token<TAB>index<TAB>frequency` lines sorted by index.
  std::string to_text() const;
  static Vocabulary from_text(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && counts_ == other.counts_;
  }

 private:
  void push(std::string token, std::uint64_t count);

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace patchrnn
