#pragma once

// Tabular output. CSV: `# key=value` comment lines, a header row, data rows,
// then trailer comment lines; JSON: {"metadata": {...}, "rows": [{...}, ...],
// "report": {...}}. Numbers are written with 17 significant digits, so both
// formats read back bit-identical.

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectrum.hpp"

namespace gauss_spectra::io {

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> trailer;  // summary written after the rows

  bool operator==(const Table& other) const {
    if (metadata != other.metadata || trailer != other.trailer || columns != other.columns || rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != other.rows[i].size()) return false;
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        const double a = rows[i][j], b = other.rows[i][j];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
      }
    }
    return true;
  }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [key, value] : table.metadata) out << "# " << key << '=' << value << '\n';
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
  for (const auto& [key, value] : table.trailer) out << "# " << key << '=' << value << '\n';
}

inline Table read_csv(std::istream& in) {
  Table table;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("metadata line without '=': " + line);
      (header ? table.trailer : table.metadata).emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!header) {
      table.columns = fields;
      header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) throw std::invalid_argument("row width differs from header: " + line);
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f));
    table.rows.push_back(std::move(row));
  }
  if (!header) throw std::invalid_argument("csv input has no header row");
  return table;
}

// JSON has no NaN or infinities: they are written as null and "inf"/"-inf".
inline void write_json(std::ostream& out, const Table& table) {
  out << "{\n  \"metadata\": {";
  bool first = true;
  for (const auto& [key, value] : table.metadata) {
    out << (first ? "\n" : ",\n") << "    " << nlohmann::ordered_json(key).dump() << ": "
        << nlohmann::ordered_json(value).dump();
    first = false;
  }
  out << (first ? "}" : "\n  }") << ",\n  \"rows\": [";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << (i ? ",\n" : "\n") << "    {";
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      const double v = table.rows[i][j];
      out << (j ? ", " : "") << nlohmann::ordered_json(table.columns[j]).dump() << ": ";
      if (std::isnan(v))
        out << "null";
      else if (std::isinf(v))
        out << '"' << format_number(v) << '"';
      else
        out << format_number(v);
    }
    out << '}';
  }
  out << (table.rows.empty() ? "]" : "\n  ]");
  if (!table.trailer.empty()) {
    out << ",\n  \"report\": {";
    for (std::size_t i = 0; i < table.trailer.size(); ++i)
      out << (i ? ",\n" : "\n") << "    " << nlohmann::ordered_json(table.trailer[i].first).dump() << ": "
          << nlohmann::ordered_json(table.trailer[i].second).dump();
    out << "\n  }";
  }
  out << "\n}\n";
}

inline Table read_json(std::istream& in) {
  const auto doc = nlohmann::ordered_json::parse(in);
  Table table;
  for (const auto& [key, value] : doc.at("metadata").items()) table.metadata.emplace_back(key, value.get<std::string>());
  if (doc.contains("report"))
    for (const auto& [key, value] : doc.at("report").items()) table.trailer.emplace_back(key, value.get<std::string>());
  for (const auto& r : doc.at("rows")) {
    if (table.columns.empty())
      for (const auto& [key, value] : r.items()) table.columns.push_back(key);
    std::vector<double> row;
    for (const auto& column : table.columns) {
      const auto& v = r.at(column);
      if (v.is_null())
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      else if (v.is_string())
        row.push_back(parse_number(v.get<std::string>()));
      else
        row.push_back(v.get<double>());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

/// One output row of a spectrum curve.
struct CurveRecord {
  double exponent = 0.0;
  double dimension = 0.0;
  double q_value = 0.0;
  double residual_1 = 0.0;
  double residual_2 = 0.0;
  double slope_fd = 0.0;
};

inline const std::vector<std::string>& curve_columns() {
  static const std::vector<std::string> columns = {"exponent", "dimension", "q_value",
                                                   "residual_1", "residual_2", "slope_fd"};
  return columns;
}

/// Records in grid order; failed grid points become rows with NaN entries.
inline std::vector<CurveRecord> curve_records(const SpectrumCurve& curve, const std::vector<double>& grid) {
  const auto slopes = finite_difference_slopes(curve);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CurveRecord> out;
  std::size_t k = 0;
  for (double x : grid) {
    if (k < curve.points.size() && curve.points[k].exponent == x) {
      const auto& p = curve.points[k];
      out.push_back({p.exponent, p.dimension, p.q_value, p.residuals[0], p.residuals[1], slopes[k]});
      ++k;
    } else {
      out.push_back({x, nan, nan, nan, nan, nan});
    }
  }
  return out;
}

inline Table curve_table(const std::vector<CurveRecord>& records,
                         std::vector<std::pair<std::string, std::string>> metadata) {
  Table t;
  t.metadata = std::move(metadata);
  t.columns = curve_columns();
  for (const auto& r : records)
    t.rows.push_back({r.exponent, r.dimension, r.q_value, r.residual_1, r.residual_2, r.slope_fd});
  return t;
}

inline std::vector<CurveRecord> records_from_table(const Table& t) {
  if (t.columns != curve_columns()) throw std::invalid_argument("table is not a spectrum curve");
  std::vector<CurveRecord> out;
  for (const auto& r : t.rows) out.push_back({r[0], r[1], r[2], r[3], r[4], r[5]});
  return out;
}

}  // namespace gauss_spectra::io
