// Minimal CSV dialect: comma separator, '#' comment lines, no quoting.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sky {

struct CsvRow {
  std::size_t line_no = 0;  // 1-based line in the source text
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::size_t header_line_no = 0;
  std::vector<CsvRow> rows;
};

// Splits `text` into header + data rows. Blank lines and lines starting
// with '#' are skipped. Every kept line must have the same arity as the
// header; a short or long row raises Errc::type_mismatch with its line.
CsvTable parse_csv(std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace sky
