#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace accesskit::io {

// Minimal RFC 4180-style table: first line is the header, fields may be
// double-quoted, blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for diagnostics.
  std::vector<std::size_t> lines;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, const std::string& source_name);

std::optional<double> parse_double(std::string_view text);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Quotes a field when it contains a separator, quote or newline.
std::string csv_field(std::string_view text);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace accesskit::io
