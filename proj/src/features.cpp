// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/features.hpp"

#include <algorithm>

#include "patchrnn/errors.hpp"

namespace patchrnn {

void write_type_features(const AbstractToken& token, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  out[static_cast<std::size_t>(token.kind)] = 1.0;
  out[kTokenTypeDim] = static_cast<double>(token.diff_type);
}

CodeFeatureSequence assemble_code_features(const std::vector<AbstractToken>& tokens,
                                           const EmbeddingTable& table,
                                           std::size_t expected_length) {
  if (tokens.size() != expected_length) {
    throw DimensionMismatch("code sequence has " + std::to_string(tokens.size()) +
                            " tokens, expected " +
                            std::to_string(expected_length));
  }
  CodeFeatureSequence seq;
  seq.length = tokens.size();
  seq.width = code_feature_dim(table.dim());
  seq.valid_length = valid_length(tokens);
  seq.values.assign(seq.length * seq.width, 0.0);
  std::span<double> all(seq.values);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto row = all.subspan(i * seq.width, seq.width);
    if (!tokens[i].is_pad()) {
      auto emb = table.lookup(tokens[i].text);
      std::copy(emb.begin(), emb.end(), row.begin());
    }
    write_type_features(tokens[i], row.subspan(table.dim()));
  }
  return seq;
}

}  // namespace patchrnn
