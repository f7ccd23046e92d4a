#ifndef OUU_EXPERIMENT_HPP
#define OUU_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "ouu/config.hpp"

namespace ouu::run {

/// Outcome of one command. status follows the process exit convention:
/// 0 success, 1 check failure, 2 config error, 3 numerical failure.
struct CommandResult {
  int status = 0;
  std::string message;

  bool ok() const { return status == 0; }
};

CommandResult solve_pde(const cfg::ExperimentConfig& config, const std::string& out_dir,
                        std::optional<std::uint64_t> sample_seed);

CommandResult sample_field_cmd(const cfg::ExperimentConfig& config, const std::string& out_dir);

/// Risk metrics of a values CSV (one value per row, optional weight
/// column; weights are renormalized). out_dir may be empty: report only.
CommandResult risk_eval(const std::string& values_csv, double alpha, const std::string& out_dir);

CommandResult optimize(const cfg::ExperimentConfig& config, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override, std::optional<int> threads);

CommandResult verify(const cfg::ExperimentConfig& config, const std::string& out_dir);

CommandResult epi_demo(const cfg::ExperimentConfig& config, const std::string& out_dir);

}  // namespace ouu::run

#endif
