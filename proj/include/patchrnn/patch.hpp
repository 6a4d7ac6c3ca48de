// SPDX-License-Identifier: Apache-2.0
//
// Parsed representation of git-style patches (format-patch, git show/log -p,
// plain unified diffs) and reconstruction of the unpatched/patched streams.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patchrnn {

enum class Label { kNonSecurity = 0, kSecurity = 1 };

std::string_view to_string(Label label);
/// Accepts "security" / "non_security" (also "non-security").
std::optional<Label> parse_label(std::string_view text);

enum class LineMarker { kAdded, kRemoved, kContext };

struct DiffLine {
  std::string content;  // without the leading marker character
  LineMarker marker;
};

struct Hunk {
  std::size_t old_start = 0;
  std::size_t old_count = 0;
  std::size_t new_start = 0;
  std::size_t new_count = 0;
  std::vector<DiffLine> lines;
};

struct FileDiff {
  std::string old_path;
  std::string new_path;
  std::vector<Hunk> hunks;

  /// new_path, or old_path when the file was deleted.
  const std::string& effective_path() const;
};

struct PatchFile {
  std::optional<std::string> commit_id;
  std::string message;
  std::vector<FileDiff> file_diffs;
  std::optional<Label> label;
  /// Notes about dropped content (binary or mode-only diffs).
  std::vector<std::string> warnings;
};

/// Parses patch text. Invalid UTF-8 is replaced with U+FFFD.
///
/// Throws MalformedPatch when no file header is present and
/// HunkCountMismatch when a hunk body disagrees with its @@ header.
PatchFile parse_patch(std::string_view text);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view text);

/// True for the C/C++ source and header extensions the classifier targets.
bool is_c_family_path(std::string_view path);

struct ReconstructedLine {
  std::string content;
  int diff_type = 0;        // -1 removed, 0 context, +1 added
  std::size_t hunk = 0;     // global hunk ordinal across all files
  std::size_t ordinal = 0;  // position of the line inside its hunk body
};

struct ReconstructedPair {
  std::vector<ReconstructedLine> unpatched;  // removed + context
  std::vector<ReconstructedLine> patched;    // added + context
};

struct ReconstructOptions {
  /// Keep files whose extension is not a C/C++ one.
  bool include_all_languages = false;
};

ReconstructedPair reconstruct(const PatchFile& patch,
                              const ReconstructOptions& options = {});

/// Drops the removed lines of the unpatched side and splices the added lines
/// back in at their hunk positions; the result equals the patched side.
std::vector<ReconstructedLine> reapply(const ReconstructedPair& pair);

}  // namespace patchrnn
