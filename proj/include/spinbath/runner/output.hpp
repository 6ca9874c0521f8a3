#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spinbath/runner/config.hpp"

namespace spinbath::runner {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);

/// Lowercase hex SHA-256 of `content`.
std::string sha256_hex(std::string_view content);

struct Column {
  std::string name;
  bool integer = false;  // printed without a fractional part
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

/// CSV: header line, then one line per row, '\n' terminated.
std::string render_csv(const Table& table);
/// JSON: {"columns": [...], "rows": [[...], ...]}.
std::string render_json(const Table& table);

struct OutputRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::size_t rows = 0;
  std::string role;
};

/// Writes `content` to dir/name, creating dir. Throws IoError on failure.
OutputRecord write_text(const std::filesystem::path& dir, const std::string& name,
                        const std::string& content, std::size_t rows, std::string role);

/// Writes the table as <stem>.csv or <stem>.json.
OutputRecord write_table(const std::filesystem::path& dir, const std::string& stem,
                         const Table& table, OutputFormat format, std::string role);

}  // namespace spinbath::runner
