// SPDX-License-Identifier: Apache-2.0
//
// "PRNN1" tensor container: magic, then records of
//   u32 name length, name bytes, u32 rank, rank x u64 dims, f64 values
// with every integer and value little-endian, until end of file.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "patchrnn/nn/tensor.hpp"

namespace patchrnn {

inline constexpr std::string_view kCheckpointMagic = "PRNN1";

struct NamedTensor {
  std::string name;
  nn::Shape shape;
  std::vector<double> values;
};

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors);
/// Throws CheckpointError on a bad magic, truncation or inconsistent record.
std::vector<NamedTensor> decode_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

/// Text stored byte-per-element in a rank-1 tensor.
NamedTensor text_tensor(std::string name, std::string_view text);
std::string tensor_text(const NamedTensor& tensor);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace patchrnn
