// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/pipeline.hpp"

namespace patchrnn {

PreparedPatch prepare_patch(const PatchFile& patch,
                            const PrepareOptions& options) {
  ReconstructOptions ro;
  ro.include_all_languages = options.include_all_languages;
  AbstractedPair pair = abstract_pair(reconstruct(patch, ro));
  PreparedPatch out;
  out.raw_unpatched_length = pair.unpatched.size();
  out.raw_patched_length = pair.patched.size();
  out.unpatched = normalize_length(std::move(pair.unpatched), options.code_length);
  out.patched = normalize_length(std::move(pair.patched), options.code_length);
  out.message = preprocess_message(patch.message, options.message_length);
  return out;
}

PreparedPatch prepare_patch_text(std::string_view text,
                                 const PrepareOptions& options) {
  return prepare_patch(parse_patch(text), options);
}

}  // namespace patchrnn
