#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace arsm::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const auto* l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

std::string header_line(const Provenance& prov) {
  std::string s = "arsm " + std::string(kVersion) + " " + prov.command;
  for (const auto& [k, v] : prov.params) s += " " + k + "=" + v;
  return s;
}

}  // namespace

void write_table(std::ostream& os, const Table& t, const Provenance& prov,
                 Format fmt) {
  if (fmt == Format::Csv) {
    os << "# " << header_line(prov) << "\n";
    os << "# table: " << t.name << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      os << (i ? "," : "") << t.columns[i];
    }
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "") << cell_text(row[i]);
      }
      os << "\n";
    }
    return;
  }
  nlohmann::ordered_json j;
  j["header"] = header_line(prov);
  j["tool"] = "arsm";
  j["version"] = kVersion;
  j["command"] = prov.command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : prov.params) params[k] = v;
  j["params"] = params;
  j["table"] = t.name;
  j["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  os << j.dump(1) << "\n";
}

std::string write_table_file(const std::string& dir, const Table& t,
                             const Provenance& prov, Format fmt) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) /
                     (t.name + (fmt == Format::Csv ? ".csv" : ".json")))
                        .string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_table(os, t, prov, fmt);
  return path;
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

}  // namespace arsm::cli
