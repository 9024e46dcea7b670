#include "foliation/csv_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "foliation/errors.hpp"

namespace foliation {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec)
      throw ConfigError("cannot create directory " +
                        p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);  // binary: no CRLF surprises
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out = open_for_write(path);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw ConfigError("csv row width " + std::to_string(row.size()) +
                        " does not match header width " +
                        std::to_string(table.header.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_g17(row[i]);
    out << '\n';
  }
  if (!out) throw ConfigError("write to " + path + " failed");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_for_write(path);
  out << content;
  if (!out) throw ConfigError("write to " + path + " failed");
}

void write_path_csv(const std::string& path, const OUProcess& ou) {
  CsvTable table;
  table.header = {"t", "W", "Z"};
  table.rows.reserve(ou.path.size());
  for (std::size_t k = 0; k < ou.path.size(); ++k)
    table.rows.push_back({ou.path.time(k), ou.path.values[k], ou.z[k]});
  write_csv(path, table);
}

}  // namespace foliation
