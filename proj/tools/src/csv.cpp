#include "ewmaopt_cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#ifndef EWMAOPT_VERSION
#define EWMAOPT_VERSION "unknown"
#endif

namespace ewmaopt::cli {

std::string fmt(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += escape(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string render(const CsvTable& table, const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config.provenance()) out += "#@ " + key + " = " + value + "\n";
  out += "#@ version = " EWMAOPT_VERSION "\n";
  append_row(out, table.header);
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

void emit(const std::vector<CsvTable>& tables, const RunConfig& config) {
  const std::string& dir = config.get("out");
  if (dir.empty()) {
    for (const auto& t : tables) std::cout << render(t, config);
    std::cout.flush();
    return;
  }
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = std::filesystem::path(dir) / (t.name + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << render(t, config);
  }
}

}  // namespace ewmaopt::cli
