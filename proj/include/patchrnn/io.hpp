// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace patchrnn {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Splits on '\n'; a trailing newline does not yield an empty last element.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
/// Throws Error unless the whole of `text` is a number.
double parse_double(std::string_view text);

}  // namespace patchrnn
