#include "ouu/csv.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ouu/errors.hpp"

namespace ouu::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string artifact_header(std::uint64_t config_hash, std::uint64_t seed) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "# config_hash=%016llx seed=%llu\n",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& row) {
  row.clear();
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    try {
      size_t used = 0;
      const double v = std::stod(cell, &used);
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) return false;
      row.push_back(v);
    } catch (...) {
      return false;
    }
  }
  return !row.empty();
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> row;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (parse_row(line, row)) rows.push_back(row);
  }
  return rows;
}

ValueTable read_value_csv(const std::string& path) {
  ValueTable t;
  const auto rows = read_numeric_csv(path);
  if (rows.empty()) throw ConfigError("no numeric rows in " + path);
  bool has_weights = rows.front().size() >= 2;
  for (const auto& r : rows) {
    t.values.push_back(r.at(0));
    if (has_weights) {
      if (r.size() < 2) throw ConfigError("ragged weight column in " + path);
      t.weights.push_back(r.at(1));
    }
  }
  return t;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory: " + path);
}

}  // namespace ouu::io
