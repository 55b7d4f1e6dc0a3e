#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace arsm::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Csv, Json };

using Cell = std::variant<double, long, std::string>;

/// %.17g, with nan/inf spelled the same on every platform.
std::string format_number(double v);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Ordered key/value pairs echoed in every header.
using ParamList = std::vector<std::pair<std::string, std::string>>;

struct Provenance {
  std::string command;
  ParamList params;
};

void write_table(std::ostream& os, const Table& t, const Provenance& prov,
                 Format fmt);

/// Writes <dir>/<name>.<csv|json>; returns the path written.
std::string write_table_file(const std::string& dir, const Table& t,
                             const Provenance& prov, Format fmt);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace arsm::cli
