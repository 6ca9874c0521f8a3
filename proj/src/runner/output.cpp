#include "spinbath/runner/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <system_error>

#include "spinbath/errors.hpp"

namespace spinbath::runner {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw IoError("could not format number");
  return std::string(buf.data(), ptr);
}

std::string sha256_hex(std::string_view content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest.data(), &length, EVP_sha256(), nullptr) !=
      1) {
    throw IoError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw IoError("table row width does not match its columns");
  rows.push_back(std::move(row));
}

namespace {

std::string render_cell(const Column& column, double value) {
  if (column.integer) return std::to_string(static_cast<std::int64_t>(value));
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  return format_number(value);
}

}  // namespace

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c].name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += render_cell(table.columns[c], row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& table) {
  std::string out = "{\"columns\":[";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += '"' + table.columns[c].name + '"';
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += ',';
      const double v = table.rows[r][c];
      // JSON has no NaN/inf literal.
      out += std::isfinite(v) ? render_cell(table.columns[c], v) : std::string("null");
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

OutputRecord write_text(const std::filesystem::path& dir, const std::string& name,
                        const std::string& content, std::size_t rows, std::string role) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return {name, sha256_hex(content), rows, std::move(role)};
}

OutputRecord write_table(const std::filesystem::path& dir, const std::string& stem,
                         const Table& table, OutputFormat format, std::string role) {
  if (format == OutputFormat::kJson) {
    return write_text(dir, stem + ".json", render_json(table), table.rows.size(), std::move(role));
  }
  return write_text(dir, stem + ".csv", render_csv(table), table.rows.size(), std::move(role));
}

}  // namespace spinbath::runner
