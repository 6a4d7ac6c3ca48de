// SPDX-License-Identifier: Apache-2.0
//
// Differentiable operations. Each one computes its output eagerly and, when
// any input requires a gradient, records the matching backward closure on
// the tape.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patchrnn/nn/tensor.hpp"

namespace patchrnn::nn {

/// y = x * W^T + b for x (n x in), W (out x in), b (out).
Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight,
              const Tensor& bias);

Tensor relu(Tape& tape, const Tensor& x);

/// Column-wise concatenation of tensors that share a row count.
Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts);

/// Rows of `table` (V x d) selected by `indices`, as an (n x d) tensor.
Tensor gather_rows(Tape& tape, const Tensor& table,
                   std::span<const std::size_t> indices);

/// sum(x^2) as a one-element tensor.
Tensor sum_squares(Tape& tape, const Tensor& x);

/// Numerically stable softmax of one row.
std::vector<double> softmax(std::span<const double> logits);

/// Mean of -log softmax(logits)[label] over rows. With `weights`, row i
/// contributes weights[i] * loss_i and the sum is divided by `normalizer`
/// (0 means the row count). Row probabilities go to `probabilities` when
/// given.
Tensor softmax_cross_entropy(Tape& tape, const Tensor& logits,
                             std::span<const int> labels,
                             std::span<const double> weights = {},
                             double normalizer = 0.0,
                             std::vector<double>* probabilities = nullptr);

}  // namespace patchrnn::nn
