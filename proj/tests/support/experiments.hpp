// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale training runs shared by the training tests and the acceptance
// binary.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "desk_corpus.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/trainer.hpp"

namespace patchrnn::testing {

/// Trains both embedding tables on `patches` and builds a model.
PatchRnnModel desk_model(const std::vector<DeskPatch>& patches, const ModelConfig& config,
                         std::size_t w2v_epochs = 5);
std::vector<EncodedSample> encode_desk(const PatchRnnModel& model,
                                       const std::vector<DeskPatch>& patches);

struct OverfitResult {
  std::size_t epochs_run = 0;
  double final_accuracy = 0.0;  // measured after training
  double seconds = 0.0;
};

/// Balanced n-sample overfit with the default architecture and one batch,
/// stopping once a full pass classifies every training sample correctly.
OverfitResult overfit_desk(std::size_t n, std::size_t max_epochs, std::uint64_t seed);

struct HoldoutResult {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double test_accuracy = 0.0;
  TrainingHistory history;
  double seconds = 0.0;
};

/// Balanced n-sample corpus, 80/20 split, embeddings trained on the training
/// part only, then `epochs` epochs with the default architecture.
HoldoutResult desk_holdout_run(std::size_t n, std::size_t epochs, std::size_t batch,
                               std::uint64_t seed);

}  // namespace patchrnn::testing
