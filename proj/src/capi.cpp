#include "ouu/ouu_c.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "ouu/config.hpp"
#include "ouu/errors.hpp"
#include "ouu/experiment.hpp"
#include "ouu/risk.hpp"

namespace {

thread_local std::string t_last_error;
thread_local std::string t_last_message;

void set_error(const std::string& msg) { t_last_error = msg; }

ouu_status map_exception() {
  try {
    throw;
  } catch (const ouu::ConfigError& e) {
    set_error(e.what());
    return OUU_CONFIG_ERROR;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return OUU_CONFIG_ERROR;
  } catch (const ouu::NumericalError& e) {
    set_error(e.what());
    return OUU_NUMERICAL_ERROR;
  } catch (const std::exception& e) {
    set_error(e.what());
    return OUU_NUMERICAL_ERROR;
  } catch (...) {
    set_error("unknown failure");
    return OUU_NUMERICAL_ERROR;
  }
}

ouu::risk::DiscreteRv make_rv(const double* values, const double* weights, int64_t n) {
  if (values == nullptr || n < 1) throw std::invalid_argument("values must be nonempty");
  std::vector<double> v(values, values + n);
  if (weights == nullptr) return ouu::risk::DiscreteRv::uniform(std::move(v));
  ouu::risk::DiscreteRv rv;
  rv.values = std::move(v);
  rv.weights.assign(weights, weights + n);
  return rv;
}

}  // namespace

struct ouu_experiment;
namespace {
ouu_status finish(ouu_experiment* exp, const ouu::run::CommandResult& r);
}

struct ouu_experiment {
  ouu::cfg::ExperimentConfig config;
  std::string out_dir;  // override; empty -> config.output_dir
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
  std::string message;

  std::string effective_out() const { return out_dir.empty() ? config.output_dir : out_dir; }
};

namespace {
ouu_status finish(ouu_experiment* exp, const ouu::run::CommandResult& r) {
  exp->message = r.message;
  if (r.status != 0) set_error(r.message);
  return static_cast<ouu_status>(r.status);
}
}  // namespace

extern "C" {

const char* ouu_version(void) { return "0.1.0"; }

const char* ouu_last_error(void) { return t_last_error.c_str(); }

const char* ouu_experiment_message(const ouu_experiment* exp) {
  return exp ? exp->message.c_str() : "";
}

ouu_status ouu_experiment_open(const char* config_path, ouu_experiment** out) {
  if (out == nullptr || config_path == nullptr) {
    set_error("null argument");
    return OUU_CONFIG_ERROR;
  }
  *out = nullptr;
  try {
    auto exp = std::make_unique<ouu_experiment>();
    exp->config = ouu::cfg::load_config_file(config_path);
    *out = exp.release();
    return OUU_OK;
  } catch (...) {
    return map_exception();
  }
}

ouu_status ouu_experiment_open_json(const char* json_text, ouu_experiment** out) {
  if (out == nullptr || json_text == nullptr) {
    set_error("null argument");
    return OUU_CONFIG_ERROR;
  }
  *out = nullptr;
  try {
    auto exp = std::make_unique<ouu_experiment>();
    exp->config = ouu::cfg::parse_config(json_text);
    *out = exp.release();
    return OUU_OK;
  } catch (...) {
    return map_exception();
  }
}

void ouu_experiment_close(ouu_experiment* exp) { delete exp; }

ouu_status ouu_experiment_set_output_dir(ouu_experiment* exp, const char* dir) {
  if (exp == nullptr || dir == nullptr) {
    set_error("null argument");
    return OUU_CONFIG_ERROR;
  }
  exp->out_dir = dir;
  return OUU_OK;
}

ouu_status ouu_experiment_set_seed(ouu_experiment* exp, uint64_t seed) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  exp->seed_override = seed;
  return OUU_OK;
}

ouu_status ouu_experiment_set_threads(ouu_experiment* exp, int32_t threads) {
  if (exp == nullptr || threads < 1) {
    set_error(exp == nullptr ? "null handle" : "threads must be positive");
    return OUU_CONFIG_ERROR;
  }
  exp->threads_override = threads;
  return OUU_OK;
}

ouu_status ouu_cmd_solve_pde(ouu_experiment* exp) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  return finish(exp, ouu::run::solve_pde(exp->config, exp->effective_out(), exp->seed_override));
}

ouu_status ouu_cmd_sample_field(ouu_experiment* exp) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  auto config = exp->config;
  if (exp->seed_override) config.seed = *exp->seed_override;
  return finish(exp, ouu::run::sample_field_cmd(config, exp->effective_out()));
}

ouu_status ouu_cmd_optimize(ouu_experiment* exp) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  return finish(exp, ouu::run::optimize(exp->config, exp->effective_out(), exp->seed_override,
                                        exp->threads_override));
}

ouu_status ouu_cmd_verify(ouu_experiment* exp) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  auto config = exp->config;
  if (exp->seed_override) config.seed = *exp->seed_override;
  if (exp->threads_override) config.threads = *exp->threads_override;
  return finish(exp, ouu::run::verify(config, exp->effective_out()));
}

ouu_status ouu_cmd_epi_demo(ouu_experiment* exp) {
  if (exp == nullptr) {
    set_error("null handle");
    return OUU_CONFIG_ERROR;
  }
  return finish(exp, ouu::run::epi_demo(exp->config, exp->effective_out()));
}

ouu_status ouu_risk_eval_csv(const char* values_csv, double alpha, const char* out_dir,
                             const char** message) {
  if (values_csv == nullptr) {
    set_error("null path");
    return OUU_CONFIG_ERROR;
  }
  const ouu::run::CommandResult r =
      ouu::run::risk_eval(values_csv, alpha, out_dir ? out_dir : "");
  t_last_message = r.message;
  if (message) *message = t_last_message.c_str();
  if (r.status != 0) set_error(r.message);
  return static_cast<ouu_status>(r.status);
}

double ouu_smax(double gamma, double beta) {
  try {
    return ouu::risk::smax(gamma, beta);
  } catch (...) {
    map_exception();
    return NAN;
  }
}

double ouu_smax_grad(double gamma, double beta) {
  try {
    return ouu::risk::smax_grad(gamma, beta);
  } catch (...) {
    map_exception();
    return NAN;
  }
}

ouu_status ouu_superquantile(const double* values, const double* weights, int64_t n, double alpha,
                             double* out) {
  if (out == nullptr) {
    set_error("null output");
    return OUU_CONFIG_ERROR;
  }
  try {
    *out = ouu::risk::superquantile(make_rv(values, weights, n), alpha);
    return OUU_OK;
  } catch (...) {
    return map_exception();
  }
}

ouu_status ouu_buffered_probability(const double* values, const double* weights, int64_t n,
                                    double* out) {
  if (out == nullptr) {
    set_error("null output");
    return OUU_CONFIG_ERROR;
  }
  try {
    *out = ouu::risk::buffered_probability(make_rv(values, weights, n));
    return OUU_OK;
  } catch (...) {
    return map_exception();
  }
}

ouu_status ouu_penalty_regret(const double* values, const double* weights, int64_t n, double alpha,
                              double* out) {
  if (out == nullptr) {
    set_error("null output");
    return OUU_CONFIG_ERROR;
  }
  try {
    *out = ouu::risk::penalty_regret(make_rv(values, weights, n), alpha);
    return OUU_OK;
  } catch (...) {
    return map_exception();
  }
}

}  // extern "C"
