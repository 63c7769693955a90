#pragma once

#include <string>
#include <vector>

#include "ewmaopt_cli/config.hpp"

namespace ewmaopt::cli {

/// Fixed numeric format for every CSV cell: 6 significant digits.
std::string fmt(double value);

/// One CSV artifact: a name (file stem), a header and rows of cells.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Provenance block (`#@ key = value` lines) followed by the table.
std::string render(const CsvTable& table, const RunConfig& config);

/// Writes each table to <out>/<name>.csv, or to standard output when the
/// out key is empty.
void emit(const std::vector<CsvTable>& tables, const RunConfig& config);

}  // namespace ewmaopt::cli
