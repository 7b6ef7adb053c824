#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "koopsub/linalg.hpp"

namespace koopsub::csv {

// 17 significant digits with a '.' decimal separator, independent of the
// locale; parses back to the identical double.
std::string format_number(double v);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t row_count() const noexcept { return rows_.size(); }

  // CRLF line endings as in RFC 4180.
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// RFC 4180 parser; accepts LF or CRLF line endings.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Parses a numeric field; throws IoError on malformed input.
double parse_number(std::string_view field);

// Long form (row, col, value).
Table matrix_table(const Matrix& m);

}  // namespace koopsub::csv

namespace koopsub::io {

// Throw IoError when the file cannot be read or written.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace koopsub::io
