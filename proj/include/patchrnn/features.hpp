// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patchrnn/abstraction.hpp"
#include "patchrnn/embedding.hpp"

namespace patchrnn {

/// One-hot over Keyword, Identifier, Literal, Punctuation, Comment, Pad.
inline constexpr std::size_t kTokenTypeDim = kTokenKindCount;

constexpr std::size_t code_feature_dim(std::size_t embed_dim) {
  return embed_dim + kTokenTypeDim + 1;
}

/// Per position: [embedding | token-type one-hot | diff type].
struct CodeFeatureSequence {
  std::size_t length = 0;
  std::size_t width = 0;
  std::size_t valid_length = 0;
  std::vector<double> values;  // length x width, row-major

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width, width);
  }
};

/// Writes the token-type one-hot and diff type of `token` into `out`
/// (kTokenTypeDim + 1 values).
void write_type_features(const AbstractToken& token, std::span<double> out);

/// Throws DimensionMismatch unless tokens.size() == expected_length.
CodeFeatureSequence assemble_code_features(const std::vector<AbstractToken>& tokens,
                                           const EmbeddingTable& table,
                                           std::size_t expected_length =
                                               kDefaultCodeLength);

}  // namespace patchrnn
