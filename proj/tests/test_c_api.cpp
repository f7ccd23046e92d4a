// Exercises the shared library strictly through the C header.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "ouu/ouu_c.h"

static int failures = 0;

#define CHECK_TRUE(cond)                                                  \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::printf("FAILED %s:%d: %s\n", __FILE__, __LINE__, #cond);       \
      ++failures;                                                         \
    }                                                                     \
  } while (0)

static bool approx(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

int main() {
  CHECK_TRUE(std::strlen(ouu_version()) > 0);

  // Stateless kernels.
  CHECK_TRUE(approx(ouu_smax(0.0, 0.5), 0.5 * std::log(2.0), 1e-15));
  CHECK_TRUE(approx(ouu_smax_grad(0.0, 0.5), 0.5, 1e-15));
  CHECK_TRUE(std::isnan(ouu_smax(0.0, -1.0)));

  const double values[4] = {1.0, 2.0, 3.0, 4.0};
  double out = 0.0;
  CHECK_TRUE(ouu_superquantile(values, nullptr, 4, 0.5, &out) == OUU_OK);
  CHECK_TRUE(approx(out, 3.5, 1e-12));
  CHECK_TRUE(ouu_superquantile(values, nullptr, 4, 1.5, &out) == OUU_CONFIG_ERROR);
  CHECK_TRUE(std::strlen(ouu_last_error()) > 0);
  CHECK_TRUE(ouu_superquantile(nullptr, nullptr, 4, 0.5, &out) == OUU_CONFIG_ERROR);

  const double mixed[2] = {-3.0, 1.0};
  CHECK_TRUE(ouu_buffered_probability(mixed, nullptr, 2, &out) == OUU_OK);
  CHECK_TRUE(approx(out, 2.0 / 3.0, 1e-9));
  const double weights[2] = {0.5, 0.5};
  CHECK_TRUE(ouu_penalty_regret(mixed, weights, 2, 0.5, &out) == OUU_OK);
  CHECK_TRUE(approx(out, 1.0, 1e-12));

  // Experiment lifecycle through a JSON config.
  const char* config = R"JSON({
    "instance": {
      "domain": [0.0, 1.0],
      "state_elements": 8,
      "control_elements": 2,
      "pde": {"c1": {"kind": "constant", "value": 1.0}, "c2": [1.0, 1.0], "s_e": [0.5, 0.5]},
      "qoi": {"alpha": 0.5},
      "initial": {"z": 1.0}
    },
    "seed": 3
  })JSON";

  ouu_experiment* exp = nullptr;
  CHECK_TRUE(ouu_experiment_open_json(config, &exp) == OUU_OK);
  CHECK_TRUE(exp != nullptr);

  const auto dir = std::filesystem::temp_directory_path() / "ouu_capi_out";
  std::filesystem::remove_all(dir);
  CHECK_TRUE(ouu_experiment_set_output_dir(exp, dir.string().c_str()) == OUU_OK);
  CHECK_TRUE(ouu_experiment_set_seed(exp, 12) == OUU_OK);
  CHECK_TRUE(ouu_experiment_set_threads(exp, 2) == OUU_OK);
  CHECK_TRUE(ouu_experiment_set_threads(exp, 0) == OUU_CONFIG_ERROR);

  CHECK_TRUE(ouu_cmd_solve_pde(exp) == OUU_OK);
  CHECK_TRUE(std::filesystem::exists(dir / "state.csv"));
  CHECK_TRUE(std::strlen(ouu_experiment_message(exp)) > 0);
  CHECK_TRUE(ouu_cmd_sample_field(exp) == OUU_OK);
  CHECK_TRUE(std::filesystem::exists(dir / "field_samples.csv"));

  // optimize without a schedule section is a config error.
  CHECK_TRUE(ouu_cmd_optimize(exp) == OUU_CONFIG_ERROR);
  ouu_experiment_close(exp);

  // Unknown keys are rejected at open.
  ouu_experiment* bad = nullptr;
  CHECK_TRUE(ouu_experiment_open_json(R"({"nope": 1})", &bad) == OUU_CONFIG_ERROR);
  CHECK_TRUE(bad == nullptr);
  CHECK_TRUE(ouu_experiment_open("/nonexistent/path.json", &bad) == OUU_CONFIG_ERROR);

  // Risk eval from a CSV file.
  const auto csv = std::filesystem::temp_directory_path() / "ouu_capi_values.csv";
  {
    std::ofstream f(csv);
    f << "-1\n-2\n";
  }
  const char* message = nullptr;
  CHECK_TRUE(ouu_risk_eval_csv(csv.string().c_str(), 0.5, nullptr, &message) == OUU_OK);
  CHECK_TRUE(message != nullptr && std::strstr(message, "buffered_probability") != nullptr);

  std::filesystem::remove_all(dir);
  std::filesystem::remove(csv);

  if (failures == 0) std::printf("c_api_tests: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
