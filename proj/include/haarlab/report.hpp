// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "haarlab/errors.hpp"

namespace haarlab {

using ReportCell = std::variant<std::int64_t, double, std::string>;

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<ReportCell>> rows;
};

/// A command's deterministic output: same config + seed, same bytes.
struct Report {
  std::string command;
  std::string config_digest;
  std::string config_echo;  // canonical config JSON (JSON format only)
  std::vector<std::string> warnings;
  ReportTable table;
};

namespace detail {

/// Floats print with 17 significant digits so values round-trip exactly.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_cell(const ReportCell& cell) {
  if (std::holds_alternative<std::int64_t>(cell)) return std::to_string(std::get<std::int64_t>(cell));
  if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
  return std::get<std::string>(cell);
}

inline std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

inline std::string json_cell(const ReportCell& cell) {
  if (std::holds_alternative<std::int64_t>(cell)) return std::to_string(std::get<std::int64_t>(cell));
  if (std::holds_alternative<double>(cell)) {
    double v = std::get<double>(cell);
    if (std::isnan(v) || std::isinf(v)) return json_quote(format_double(v));  // JSON has no inf/nan
    return format_double(v);
  }
  return json_quote(std::get<std::string>(cell));
}

}  // namespace detail

enum class ReportFormat { csv, json };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw config_error("format: expected \"csv\" or \"json\", got \"" + s + "\"");
}

/// CSV: RFC 4180 quoting, "\n" line endings, header row first.
/// JSON: stable key order, hand-emitted so float formatting matches CSV.
inline std::string emit_report(const Report& rep, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    for (std::size_t i = 0; i < rep.table.columns.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_quote(rep.table.columns[i]);
    }
    out += '\n';
    for (const auto& row : rep.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += detail::csv_quote(detail::format_cell(row[i]));
      }
      out += '\n';
    }
    return out;
  }
  out += "{\"command\":" + detail::json_quote(rep.command);
  out += ",\"config_digest\":" + detail::json_quote(rep.config_digest);
  if (!rep.config_echo.empty()) out += ",\"config\":" + rep.config_echo;
  out += ",\"warnings\":[";
  for (std::size_t i = 0; i < rep.warnings.size(); ++i) {
    if (i) out += ',';
    out += detail::json_quote(rep.warnings[i]);
  }
  out += "],\"table\":{\"name\":" + detail::json_quote(rep.table.name) + ",\"columns\":[";
  for (std::size_t i = 0; i < rep.table.columns.size(); ++i) {
    if (i) out += ',';
    out += detail::json_quote(rep.table.columns[i]);
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < rep.table.rows.size(); ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t i = 0; i < rep.table.rows[r].size(); ++i) {
      if (i) out += ',';
      out += detail::json_cell(rep.table.rows[r][i]);
    }
    out += ']';
  }
  out += "]}}";
  out += '\n';
  return out;
}

}  // namespace haarlab
