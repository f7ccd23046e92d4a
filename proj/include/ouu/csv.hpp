#ifndef OUU_CSV_HPP
#define OUU_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ouu::io {

/// Shortest round-trip decimal form of a double ("%.17g"), so repeated
/// runs emit byte-identical artifacts.
std::string format_double(double v);

/// Artifact header line carrying the config hash and seed.
std::string artifact_header(std::uint64_t config_hash, std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

/// Read a CSV of risk values: one value per row, optional second weight
/// column; '#' lines and a non-numeric first row are skipped.
struct ValueTable {
  std::vector<double> values;
  std::vector<double> weights;  // empty when absent
};
ValueTable read_value_csv(const std::string& path);

/// Parse a numeric CSV produced by this project (skips '#' and header rows).
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

void ensure_directory(const std::string& path);

}  // namespace ouu::io

#endif
