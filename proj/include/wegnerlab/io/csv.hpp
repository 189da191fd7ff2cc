#pragma once

/// Tables with shortest round-trip number formatting.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace wegnerlab::io {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, end);
}

using Cell = std::variant<double, std::int64_t, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Comment row with the manifest digest, then the header, then the rows.
inline void write_csv(std::ostream& out, const Table& table, const std::string& digest) {
  out << "# manifest: " << digest << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

}  // namespace wegnerlab::io
