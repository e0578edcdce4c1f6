#include "sky/csv.hpp"

#include "sky/error.hpp"

namespace sky {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  // Trim surrounding spaces and a trailing '\r' from every field.
  for (auto& f : out) {
    std::size_t b = f.find_first_not_of(" \t\r");
    std::size_t e = f.find_last_not_of(" \t\r");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos) ? text.substr(pos) : text.substr(pos, nl - pos);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::size_t first = line.find_first_not_of(" \t");
    if (line[first] == '#') continue;
    auto fields = split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      table.header_line_no = line_no;
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(Errc::type_mismatch, "line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(table.header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    table.rows.push_back(CsvRow{line_no, std::move(fields)});
  }
  return table;
}

}  // namespace sky
