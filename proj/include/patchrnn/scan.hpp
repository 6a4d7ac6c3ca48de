// SPDX-License-Identifier: Apache-2.0
//
// Batch classification of a collection of commits.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patchrnn/model.hpp"

namespace patchrnn {

struct ScanRow {
  std::string path;
  std::optional<std::string> commit_id;
  std::optional<Label> label;
  std::optional<double> probability;
  std::optional<std::string> error;
};

struct ScanInput {
  std::string path;
  std::string text;
};

/// Rows are sorted by descending probability, then path; failed files come
/// last, by path.
struct ScanReport {
  std::vector<ScanRow> rows;
  std::size_t flagged = 0;  // rows labeled security
  std::size_t total = 0;    // rows classified without error
  std::string model_version;

  std::string to_text() const;
  std::string to_json() const;
};

ScanReport scan_commits(const PatchRnnModel& model,
                        const std::vector<ScanInput>& inputs,
                        std::size_t threads = 1);

/// Reads every regular file under `dir` (recursively, sorted by path).
std::vector<ScanInput> read_scan_inputs(const std::filesystem::path& dir);

}  // namespace patchrnn
