// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "patchrnn/embedding.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/pipeline.hpp"

namespace patchrnn {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> validation_loss;
  std::optional<double> validation_accuracy;
};

struct TrainingHistory {
  double initial_loss = 0.0;  // mean training loss before the first update
  std::vector<EpochRecord> epochs;
  std::optional<std::size_t> best_epoch;  // set when a holdout was used

  std::string to_json() const;
};

struct TrainOptions {
  const std::vector<EncodedSample>* holdout = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
  /// Training ends after the first epoch for which this returns true.
  std::function<bool(const EpochRecord&)> stop_after;
};

/// Mini-batch Adam on softmax cross-entropy with the model's config (batch
/// size, lr, epochs, seed, security weight). The last partial batch is kept.
/// With a holdout, the parameters of the best validation-accuracy epoch are
/// restored at the end. Throws EmptyDataset or SingleClassDataset.
TrainingHistory train(PatchRnnModel& model,
                      const std::vector<EncodedSample>& samples,
                      const TrainOptions& options = {});

struct LossAndAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean unweighted cross-entropy and accuracy over labeled samples.
LossAndAccuracy measure(const PatchRnnModel& model,
                        const std::vector<EncodedSample>& samples);

/// word2vec corpora: each normalized code side (pads dropped) or message is
/// one sentence.
std::vector<std::vector<std::string>> code_corpus(
    const std::vector<PreparedPatch>& patches);
std::vector<std::vector<std::string>> message_corpus(
    const std::vector<PreparedPatch>& patches);

/// train_embeddings, except that a corpus without any trainable pair yields
/// an all-zero table instead of throwing.
EmbeddingTable embed_corpus(const std::vector<std::vector<std::string>>& corpus,
                            const Word2VecConfig& w2v);

/// Trains both embedding tables on `patches` and builds a fresh model.
PatchRnnModel build_model(const std::vector<PreparedPatch>& patches,
                          const ModelConfig& config,
                          const Word2VecConfig& w2v);

}  // namespace patchrnn
