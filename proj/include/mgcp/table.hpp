#pragma once

// Column-named result tables with two serializations: RFC 4180 CSV and a
// {"columns": [...], "rows": [[...]]} JSON document. Numbers are written at
// round-trip precision; empty cells become an empty CSV field or JSON null.
// Requires the vendored single-header JSON library.

#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mgcp {

using Cell = std::variant<std::monostate, long long, double, std::string>;

struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument(
          "OutputTable: row width differs from the header");
    rows.push_back(std::move(row));
  }
};

namespace detail {

// shortest decimal form that parses back to the same double
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string cell_text(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return {};
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

// header row always first; fields quoted per RFC 4180, lines end with \n
inline std::string to_csv(const OutputTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += detail::csv_field(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_field(detail::cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const OutputTable& t) {
  nlohmann::json j;
  j["columns"] = t.columns;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& c : row) {
      if (std::holds_alternative<std::monostate>(c))
        jr.push_back(nullptr);
      else if (const auto* i = std::get_if<long long>(&c))
        jr.push_back(*i);
      else if (const auto* d = std::get_if<double>(&c))
        jr.push_back(*d);
      else
        jr.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(jr));
  }
  return j.dump();
}

}  // namespace mgcp
