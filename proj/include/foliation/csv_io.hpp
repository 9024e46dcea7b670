#pragma once

#include <string>
#include <vector>

#include "foliation/noise.hpp"

namespace foliation {

/// Shortest decimal form that round-trips a double (17 significant digits,
/// '.' decimal point regardless of locale).
std::string format_g17(double x);

/// Rectangular numeric table with a mandatory header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Writes the table to `path` (parent directories created). Every cell is
/// format_g17; rows must match the header width. Same table, same bytes.
void write_csv(const std::string& path, const CsvTable& table);

/// Writes `content` verbatim (parent directories created).
void write_text_file(const std::string& path, const std::string& content);

/// Path dump `t,W,Z` over the full support of the path.
void write_path_csv(const std::string& path, const OUProcess& ou);

}  // namespace foliation
