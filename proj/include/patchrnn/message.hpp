// SPDX-License-Identifier: Apache-2.0
//
// Commit-message normalization: lowercase, clearance, tokenization, filtering,
// stopword removal, Porter stemming and fixed-length padding.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace patchrnn {

inline constexpr std::size_t kDefaultMessageLength = 200;

/// Porter stemmer, following the reference C release (which adds the
/// "logi" -> "log" rule and maps "bli" -> "ble" in step 2). Expects lowercase
/// input; words of one or two characters are returned unchanged.
std::string porter_stem(std::string_view word);

/// The pinned 179-word English stopword list.
const std::unordered_set<std::string>& english_stopwords();

/// Lowercases and removes URLs, standalone numbers and sign-off footer lines
/// ("signed-off-by:", "reviewed-by:", "cc:", ... plus their continuation
/// lines).
std::string clear_message(std::string_view message);

/// Splits on whitespace; leading/trailing punctuation becomes separate tokens
/// while internal apostrophes and hyphens stay attached. E-mail addresses are
/// kept whole.
std::vector<std::string> tokenize_words(std::string_view text);

bool is_email(std::string_view token);

struct MessageOptions {
  bool remove_stopwords = true;
  bool stem = true;
};

/// Steps up to and including stemming, without padding.
std::vector<std::string> message_words(std::string_view message,
                                       const MessageOptions& options = {});

struct MessageTokens {
  std::vector<std::string> tokens;  // exactly the target length

  std::size_t valid_length() const;
};

MessageTokens preprocess_message(std::string_view message,
                                 std::size_t target = kDefaultMessageLength);

}  // namespace patchrnn
