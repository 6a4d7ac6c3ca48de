// SPDX-License-Identifier: Apache-2.0
//
// Patch -> normalized token sequences (both code sides and the message).
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "patchrnn/abstraction.hpp"
#include "patchrnn/message.hpp"
#include "patchrnn/patch.hpp"

namespace patchrnn {

struct PrepareOptions {
  std::size_t code_length = kDefaultCodeLength;
  std::size_t message_length = kDefaultMessageLength;
  bool include_all_languages = false;
};

struct PreparedPatch {
  std::vector<AbstractToken> unpatched;  // exactly code_length
  std::vector<AbstractToken> patched;
  MessageTokens message;                 // exactly message_length
  std::size_t raw_unpatched_length = 0;  // before normalization
  std::size_t raw_patched_length = 0;
};

/// reconstruct -> lex -> abstract (shared table) -> normalize, plus the
/// message pipeline.
PreparedPatch prepare_patch(const PatchFile& patch,
                            const PrepareOptions& options = {});

/// parse_patch + prepare_patch.
PreparedPatch prepare_patch_text(std::string_view text,
                                 const PrepareOptions& options = {});

}  // namespace patchrnn
