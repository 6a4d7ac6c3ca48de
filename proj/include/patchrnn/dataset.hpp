// SPDX-License-Identifier: Apache-2.0
//
// Labeled patch corpora on disk, train/test splitting and evaluation.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "patchrnn/metrics.hpp"
#include "patchrnn/model.hpp"
#include "patchrnn/patch.hpp"

namespace patchrnn {

struct Sample {
  std::string path;  // relative to the dataset root
  PatchFile patch;   // patch.label is set
  Label label;
  std::string label_origin;  // "directory" or "labels.csv"
};

struct LoadFailure {
  std::string path;
  std::string message;
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<LoadFailure> failures;
};

/// Reads `root/labels.csv` (header `path,label`) when present, otherwise
/// every regular file under `root/security/` and `root/non_security/`.
/// Samples are ordered by path. Unparseable files land in `failures`.
/// Throws MissingRoot, or AllSamplesFailed when nothing loads.
Dataset load_dataset(const std::filesystem::path& root);

/// Deterministic split of [0, n): a seeded shuffle puts llround(fraction*n)
/// indices in the first part. Both parts come back in ascending order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double train_fraction, std::uint64_t seed);

std::pair<std::vector<Sample>, std::vector<Sample>> split(
    const std::vector<Sample>& samples, double train_fraction = 0.8,
    std::uint64_t seed = 1);

struct Evaluation {
  ConfusionMatrix confusion;
  Metrics metrics;
  std::vector<Prediction> predictions;  // in input order
};

/// Throws EmptyMatrix for an empty sample list.
Evaluation evaluate(const PatchRnnModel& model, const std::vector<Sample>& samples,
                    std::size_t threads = 1);
Evaluation evaluate_encoded(const PatchRnnModel& model,
                            const std::vector<EncodedSample>& samples,
                            std::size_t threads = 1);

}  // namespace patchrnn
