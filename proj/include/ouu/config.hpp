#ifndef OUU_CONFIG_HPP
#define OUU_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ouu/fem.hpp"
#include "ouu/optimizer.hpp"
#include "ouu/random_field.hpp"
#include "ouu/saa.hpp"

namespace ouu::cfg {

/// Problem instance: meshes, PDE data, random field, quantities of
/// interest, admissible box and the starting point.
struct InstanceConfig {
  Interval domain{0.0, 1.0};
  int state_elements = 64;
  int control_elements = 16;
  fem::PdeData pde;
  std::shared_ptr<const FieldSpec> field;
  saa::QoiSpec qoi;
  double theta_reg = 0.0;
  saa::ObjectiveMode mode = saa::ObjectiveMode::Expectation;
  saa::Box box;
  std::vector<double> z0;  // expanded to control_elements entries
  double gamma0 = 0.0;
  double sigma0 = 0.0;

  Mesh state_mesh() const { return Mesh::uniform(state_elements, domain); }
  Mesh control_mesh() const { return Mesh::uniform(control_elements, domain); }
  saa::ControlPoint start() const;
};

/// Thresholds of the verification battery; loosening or tightening them
/// is how negative controls are wired in.
struct VerifyParams {
  std::vector<int> rate_levels{16, 32, 64, 128, 256};
  double rate_min = 1.9;
  std::vector<int> decay_levels{16, 32, 64, 128};
  int decay_samples = 20;
  double decay_min_order = 1.0;
  double smax_bound_factor = 2.0;
  int superquantile_laws = 1000;
  double superquantile_tol = 1e-10;
  int duality_laws = 200;
  int duality_alpha_points = 25;
  int probe_n_mc = 20000;
  double probe_se_factor = 3.0;
};

struct EpiDemoParams {
  double epsilon = 1e-3;
  std::vector<std::pair<int, double>> stages{{10, 0.3}, {100, 0.05}, {1000, 5e-3}, {10000, 5e-4}};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct SampleFieldParams {
  int count = 5;
  int grid_points = 201;
};

struct ExperimentConfig {
  std::optional<InstanceConfig> instance;
  std::optional<opt::Schedule> schedule;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_dir = "out";
  double feasibility_tolerance = 1e-3;
  int nu_ref = 10000;
  VerifyParams verify;
  EpiDemoParams epi;
  SampleFieldParams sample_field;
  std::uint64_t config_hash = 0;

  const InstanceConfig& require_instance() const;
  const opt::Schedule& require_schedule() const;
};

/// Parse + validate; unknown keys and nonfinite numbers are rejected
/// with a ConfigError naming the offending path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace ouu::cfg

#endif
