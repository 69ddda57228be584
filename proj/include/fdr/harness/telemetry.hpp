#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdr {

// Column-named table of doubles, one row per sample. CSV values are written
// with 17 significant digits so a write/read cycle is bit-exact.
struct TelemetryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }

  int require_col(const std::string& name) const {
    const int i = col(name);
    if (i < 0) throw std::invalid_argument("telemetry: missing column " + name);
    return i;
  }

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("telemetry: row width does not match header");
    rows.push_back(std::move(row));
  }

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  void write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("telemetry: cannot open " + path + " for writing");
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      out << columns[i];
    }
    out << '\n';
    char buf[40];
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        std::snprintf(buf, sizeof buf, "%.17g", row[i]);
        out << buf;
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("telemetry: write failed for " + path);
  }

  static TelemetryTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("telemetry: cannot open " + path);
    TelemetryTable t;
    std::string line;
    if (!std::getline(in, line)) return t;  // empty file -> empty table
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t pos = 0;
    while (pos <= line.size()) {
      const size_t comma = line.find(',', pos);
      const size_t end = comma == std::string::npos ? line.size() : comma;
      t.columns.push_back(line.substr(pos, end - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<double> row;
      row.reserve(t.columns.size());
      pos = 0;
      while (pos <= line.size()) {
        const size_t comma = line.find(',', pos);
        const size_t end = comma == std::string::npos ? line.size() : comma;
        double v = std::numeric_limits<double>::quiet_NaN();
        const char* first = line.data() + pos;
        const char* last = line.data() + end;
        if (first != last) {
          const auto rc = std::from_chars(first, last, v);
          if (rc.ec != std::errc{} || rc.ptr != last)
            throw std::runtime_error("telemetry: unparsable cell in " + path);
        }
        row.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (row.size() != t.columns.size())
        throw std::runtime_error("telemetry: ragged row in " + path);
      t.rows.push_back(std::move(row));
    }
    return t;
  }
};

}  // namespace fdr
