// SPDX-License-Identifier: Apache-2.0
#include "patchrnn/patch.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "patchrnn/errors.hpp"

namespace patchrnn {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool is_hex40(std::string_view s) {
  return s.size() == 40 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

// "From <hash> Mon Sep 17 00:00:00 2001" or "commit <hash> (HEAD -> x)".
std::optional<std::string> leading_commit_id(std::string_view line) {
  for (std::string_view prefix : {"From ", "commit "}) {
    if (starts_with(line, prefix)) {
      std::string_view rest = line.substr(prefix.size());
      std::string_view hash(rest.begin(), std::find(rest.begin(), rest.end(), ' '));
      if (is_hex40(hash)) return std::string(hash);
    }
  }
  return std::nullopt;
}

// RFC 822-ish "Key: value" header lines (From:, Date:, Subject:, Author:...).
bool is_header_line(std::string_view line) {
  if (line.empty() || !std::isalpha(static_cast<unsigned char>(line[0]))) {
    return false;
  }
  std::size_t i = 0;
  while (i < line.size() &&
         (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '-')) {
    ++i;
  }
  return i < line.size() && line[i] == ':' &&
         (i + 1 == line.size() || line[i + 1] == ' ' || line[i + 1] == '\t');
}

bool is_known_header_start(std::string_view line) {
  for (std::string_view key : {"From:", "Date:", "Subject:", "Author:"}) {
    if (starts_with(line, key)) return true;
  }
  return false;
}

std::string strip_subject_tag(std::string_view subject) {
  while (!subject.empty() && subject.front() == ' ') subject.remove_prefix(1);
  if (starts_with(subject, "[")) {
    std::size_t close = subject.find(']');
    if (close != std::string_view::npos) subject.remove_prefix(close + 1);
  }
  while (!subject.empty() && subject.front() == ' ') subject.remove_prefix(1);
  return std::string(subject);
}

std::string join_message(const std::vector<std::string_view>& body,
                         const std::string& subject) {
  // Strip the common indentation (git log indents the body by 4 spaces).
  std::size_t indent = std::string_view::npos;
  for (std::string_view line : body) {
    if (is_blank(line)) continue;
    std::size_t n = 0;
    while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
    indent = std::min(indent, n);
  }
  std::vector<std::string> lines;
  if (!subject.empty()) {
    lines.push_back(subject);
    lines.emplace_back();
  }
  for (std::string_view line : body) {
    if (is_blank(line)) {
      if (lines.empty() || lines.back().empty()) continue;
      lines.emplace_back();
    } else {
      std::string_view l = line.substr(indent);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      lines.emplace_back(l);
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t first = 0;
  while (first < lines.size() && lines[first].empty()) ++first;
  std::string out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  return out;
}

std::string parse_header_path(std::string_view line) {
  // "--- a/src/x.c", "+++ b/src/x.c\t2020-01-01 ...", "--- /dev/null"
  std::string_view path = line.substr(4);
  if (std::size_t tab = path.find('\t'); tab != std::string_view::npos) {
    path = path.substr(0, tab);
  }
  while (!path.empty() && (path.back() == '\r' || path.back() == ' ')) {
    path.remove_suffix(1);
  }
  if (path.size() >= 2 && path.front() == '"' && path.back() == '"') {
    path = path.substr(1, path.size() - 2);
  }
  if (starts_with(path, "a/") || starts_with(path, "b/")) path.remove_prefix(2);
  return std::string(path);
}

std::size_t parse_number(std::string_view s, std::size_t& pos, bool& ok) {
  std::size_t value = 0;
  auto [ptr, ec] =
      std::from_chars(s.data() + pos, s.data() + s.size(), value);
  if (ec != std::errc()) {
    ok = false;
    return 0;
  }
  pos = static_cast<std::size_t>(ptr - s.data());
  return value;
}

// "@@ -75,6 +75,9 @@ optional section heading"
bool parse_hunk_header(std::string_view line, Hunk& hunk) {
  std::size_t pos = 3;
  bool ok = true;
  if (line.size() < 4 || line[pos] != '-') return false;
  ++pos;
  hunk.old_start = parse_number(line, pos, ok);
  hunk.old_count = 1;
  if (ok && pos < line.size() && line[pos] == ',') {
    ++pos;
    hunk.old_count = parse_number(line, pos, ok);
  }
  if (!ok || pos + 1 >= line.size() || line[pos] != ' ' || line[pos + 1] != '+') {
    return false;
  }
  pos += 2;
  hunk.new_start = parse_number(line, pos, ok);
  hunk.new_count = 1;
  if (ok && pos < line.size() && line[pos] == ',') {
    ++pos;
    hunk.new_count = parse_number(line, pos, ok);
  }
  return ok && starts_with(line.substr(pos), " @@");
}

class DiffParser {
 public:
  explicit DiffParser(const std::vector<std::string_view>& lines)
      : lines_(lines) {}

  bool is_file_start(std::size_t k) const {
    if (starts_with(lines_[k], "diff --git ")) return true;
    return is_unified_header(k);
  }

  void parse(std::size_t k, PatchFile& patch) {
    while (k < lines_.size()) {
      if (starts_with(lines_[k], "diff --git ")) {
        k = parse_git_file(k, patch);
      } else if (is_unified_header(k)) {
        FileDiff diff;
        k = parse_file_body(k, diff);
        keep_or_drop(std::move(diff), false, patch);
      } else {
        ++k;  // preamble noise: "Index:", "===", "-- ", version trailer...
      }
    }
  }

 private:
  bool is_unified_header(std::size_t k) const {
    return starts_with(lines_[k], "--- ") && k + 1 < lines_.size() &&
           starts_with(lines_[k + 1], "+++ ");
  }

  std::size_t parse_git_file(std::size_t k, PatchFile& patch) {
    FileDiff diff;
    std::string_view header = lines_[k].substr(11);
    if (std::size_t b = header.find(" b/"); b != std::string_view::npos) {
      std::string_view old_path = header.substr(0, b);
      if (starts_with(old_path, "a/")) old_path.remove_prefix(2);
      diff.old_path = std::string(old_path);
      diff.new_path = std::string(header.substr(b + 3));
    }
    bool binary = false;
    ++k;
    while (k < lines_.size() && !starts_with(lines_[k], "diff --git ") &&
           !is_unified_header(k)) {
      std::string_view line = lines_[k];
      if (starts_with(line, "Binary files ") || line == "GIT binary patch") {
        binary = true;
      } else if (starts_with(line, "rename from ")) {
        diff.old_path = std::string(line.substr(12));
      } else if (starts_with(line, "rename to ")) {
        diff.new_path = std::string(line.substr(10));
      }
      ++k;
    }
    if (k < lines_.size() && is_unified_header(k)) {
      k = parse_file_body(k, diff);
    }
    keep_or_drop(std::move(diff), binary, patch);
    return k;
  }

  std::size_t parse_file_body(std::size_t k, FileDiff& diff) {
    diff.old_path = parse_header_path(lines_[k]);
    diff.new_path = parse_header_path(lines_[k + 1]);
    k += 2;
    while (k < lines_.size() && starts_with(lines_[k], "@@ ")) {
      Hunk hunk;
      const std::size_t index = diff.hunks.size();
      if (!parse_hunk_header(lines_[k], hunk)) {
        throw HunkCountMismatch(diff.effective_path(), index,
                                "unreadable header '" + std::string(lines_[k]) +
                                    "'");
      }
      ++k;
      std::size_t old_seen = 0;
      std::size_t new_seen = 0;
      while (old_seen < hunk.old_count || new_seen < hunk.new_count) {
        if (k >= lines_.size()) {
          throw HunkCountMismatch(diff.effective_path(), index,
                                  "body ends before the declared counts");
        }
        std::string_view line = lines_[k];
        if (starts_with(line, "\\")) {
          ++k;  // "\ No newline at end of file"
          continue;
        }
        const char marker = line.empty() ? ' ' : line[0];
        std::string content(line.empty() ? std::string_view() : line.substr(1));
        if (marker == ' ' && old_seen < hunk.old_count &&
            new_seen < hunk.new_count) {
          hunk.lines.push_back({std::move(content), LineMarker::kContext});
          ++old_seen;
          ++new_seen;
        } else if (marker == '-' && old_seen < hunk.old_count) {
          hunk.lines.push_back({std::move(content), LineMarker::kRemoved});
          ++old_seen;
        } else if (marker == '+' && new_seen < hunk.new_count) {
          hunk.lines.push_back({std::move(content), LineMarker::kAdded});
          ++new_seen;
        } else {
          throw HunkCountMismatch(
              diff.effective_path(), index,
              "declared -" + std::to_string(hunk.old_count) + " +" +
                  std::to_string(hunk.new_count) + " but line '" +
                  std::string(line) + "' does not fit");
        }
        ++k;
      }
      while (k < lines_.size() && starts_with(lines_[k], "\\")) ++k;
      if (k < lines_.size() && overruns_hunk(k)) {
        throw HunkCountMismatch(diff.effective_path(), index,
                                "body is longer than the declared counts");
      }
      diff.hunks.push_back(std::move(hunk));
    }
    return k;
  }

  // A diff body line right after a complete hunk means the header undercounts.
  bool overruns_hunk(std::size_t k) const {
    std::string_view line = lines_[k];
    if (line.empty() || line == "-- " || line == "--") return false;
    if (line[0] != '+' && line[0] != '-' && line[0] != ' ') return false;
    return !is_unified_header(k);
  }

  void keep_or_drop(FileDiff diff, bool binary, PatchFile& patch) {
    if (!diff.hunks.empty()) {
      patch.file_diffs.push_back(std::move(diff));
      return;
    }
    patch.warnings.push_back(
        std::string(binary ? "binary diff" : "diff without hunks") +
        " dropped: " + diff.effective_path());
  }

  const std::vector<std::string_view>& lines_;
};

}  // namespace

std::string_view to_string(Label label) {
  return label == Label::kSecurity ? "security" : "non_security";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "security") return Label::kSecurity;
  if (text == "non_security" || text == "non-security") {
    return Label::kNonSecurity;
  }
  return std::nullopt;
}

const std::string& FileDiff::effective_path() const {
  return (new_path.empty() || new_path == "/dev/null") ? old_path : new_path;
}

std::string sanitize_utf8(std::string_view text) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto cont = [&](std::size_t j, unsigned char lo = 0x80,
                  unsigned char hi = 0xBF) {
    if (j >= text.size()) return false;
    auto c = static_cast<unsigned char>(text[j]);
    return c >= lo && c <= hi;
  };
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if (c >= 0xC2 && c <= 0xDF) {
      len = cont(i + 1) ? 2 : 0;
    } else if (c >= 0xE0 && c <= 0xEF) {
      const unsigned char lo = c == 0xE0 ? 0xA0 : 0x80;
      const unsigned char hi = c == 0xED ? 0x9F : 0xBF;
      len = (cont(i + 1, lo, hi) && cont(i + 2)) ? 3 : 0;
    } else if (c >= 0xF0 && c <= 0xF4) {
      const unsigned char lo = c == 0xF0 ? 0x90 : 0x80;
      const unsigned char hi = c == 0xF4 ? 0x8F : 0xBF;
      len = (cont(i + 1, lo, hi) && cont(i + 2) && cont(i + 3)) ? 4 : 0;
    }
    if (len == 0) {
      out += kReplacement;
      ++i;
    } else {
      out.append(text.substr(i, len));
      i += len;
    }
  }
  return out;
}

bool is_c_family_path(std::string_view path) {
  const std::size_t dot = path.rfind('.');
  if (dot == std::string_view::npos) return false;
  std::string ext(path.substr(dot));
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (std::string_view known : {".c", ".h", ".cc", ".cpp", ".cxx", ".hpp", ".hh"}) {
    if (ext == known) return true;
  }
  return false;
}

PatchFile parse_patch(std::string_view raw) {
  const std::string text = sanitize_utf8(raw);
  const std::vector<std::string_view> lines = split_lines(text);
  DiffParser parser(lines);

  std::size_t first_diff = lines.size();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (parser.is_file_start(k)) {
      first_diff = k;
      break;
    }
  }
  if (first_diff == lines.size()) {
    throw MalformedPatch("no 'diff --git' or '---'/'+++' file header found");
  }

  PatchFile patch;
  std::size_t k = 0;
  bool email = false;
  if (first_diff > 0) {
    patch.commit_id = leading_commit_id(lines[0]);
    if (patch.commit_id) {
      email = starts_with(lines[0], "From ");
      k = 1;
    }
  }

  std::string subject;
  if (patch.commit_id || (first_diff > 0 && is_known_header_start(lines[0]))) {
    bool in_subject = false;
    while (k < first_diff && !is_blank(lines[k])) {
      std::string_view line = lines[k];
      if (is_header_line(line)) {
        in_subject = starts_with(line, "Subject:");
        if (in_subject) subject = strip_subject_tag(line.substr(8));
      } else if ((line[0] == ' ' || line[0] == '\t') && in_subject) {
        subject += ' ';
        subject += strip_subject_tag(line);
      } else {
        break;
      }
      ++k;
    }
  }

  std::vector<std::string_view> body;
  for (; k < first_diff; ++k) {
    // format-patch puts "---" and a diffstat between message and diff.
    if (email && lines[k] == "---") break;
    body.push_back(lines[k]);
  }
  patch.message = join_message(body, subject);

  parser.parse(first_diff, patch);
  return patch;
}

ReconstructedPair reconstruct(const PatchFile& patch,
                              const ReconstructOptions& options) {
  ReconstructedPair pair;
  std::size_t hunk_ordinal = 0;
  for (const FileDiff& file : patch.file_diffs) {
    if (!options.include_all_languages &&
        !is_c_family_path(file.effective_path())) {
      continue;
    }
    for (const Hunk& hunk : file.hunks) {
      for (std::size_t j = 0; j < hunk.lines.size(); ++j) {
        const DiffLine& line = hunk.lines[j];
        switch (line.marker) {
          case LineMarker::kRemoved:
            pair.unpatched.push_back({line.content, -1, hunk_ordinal, j});
            break;
          case LineMarker::kAdded:
            pair.patched.push_back({line.content, +1, hunk_ordinal, j});
            break;
          case LineMarker::kContext:
            pair.unpatched.push_back({line.content, 0, hunk_ordinal, j});
            pair.patched.push_back({line.content, 0, hunk_ordinal, j});
            break;
        }
      }
      ++hunk_ordinal;
    }
  }
  return pair;
}

std::vector<ReconstructedLine> reapply(const ReconstructedPair& pair) {
  std::vector<ReconstructedLine> kept;
  for (const ReconstructedLine& line : pair.unpatched) {
    if (line.diff_type != -1) kept.push_back(line);
  }
  std::vector<ReconstructedLine> added;
  for (const ReconstructedLine& line : pair.patched) {
    if (line.diff_type == +1) added.push_back(line);
  }
  auto position = [](const ReconstructedLine& l) {
    return std::pair(l.hunk, l.ordinal);
  };
  std::vector<ReconstructedLine> out;
  out.reserve(kept.size() + added.size());
  std::merge(kept.begin(), kept.end(), added.begin(), added.end(),
             std::back_inserter(out),
             [&](const ReconstructedLine& a, const ReconstructedLine& b) {
               return position(a) < position(b);
             });
  return out;
}

}  // namespace patchrnn
