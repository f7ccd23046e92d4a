// Command-line front end. Everything goes through the shared library's
// C API; status codes become process exit codes directly.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "ouu/ouu_c.h"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
  auto* c = cmd->add_option("--config", o.config, "experiment config file (JSON)");
  if (config_required) c->required();
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--seed", o.seed, "seed override")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--threads", o.threads, "worker threads for per-sample solves");
}

using ExperimentPtr = std::unique_ptr<ouu_experiment, decltype(&ouu_experiment_close)>;

int open_experiment(const CommonOpts& o, ExperimentPtr& exp) {
  ouu_experiment* raw = nullptr;
  const ouu_status st = ouu_experiment_open(o.config.c_str(), &raw);
  if (st != OUU_OK) {
    std::fprintf(stderr, "error: %s\n", ouu_last_error());
    return st;
  }
  exp.reset(raw);
  if (!o.out.empty()) ouu_experiment_set_output_dir(exp.get(), o.out.c_str());
  if (o.seed_set) ouu_experiment_set_seed(exp.get(), o.seed);
  if (o.threads > 0) ouu_experiment_set_threads(exp.get(), o.threads);
  return OUU_OK;
}

int run_command(const CommonOpts& o, ouu_status (*command)(ouu_experiment*)) {
  ExperimentPtr exp(nullptr, &ouu_experiment_close);
  if (int st = open_experiment(o, exp); st != OUU_OK) return st;
  const ouu_status st = command(exp.get());
  const char* msg = ouu_experiment_message(exp.get());
  if (msg && *msg) std::printf("%s\n", msg);
  if (st != OUU_OK) std::fprintf(stderr, "error (%d): %s\n", st, ouu_last_error());
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE-constrained optimization under uncertainty"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ouu_version()));

  CommonOpts solve_opts, field_opts, opt_opts, verify_opts, epi_opts;

  auto* solve = app.add_subcommand("solve-pde", "solve one state equation and dump (x, u)");
  add_common(solve, solve_opts);

  auto* field = app.add_subcommand("sample-field", "draw conductivity samples and dump them");
  add_common(field, field_opts);

  auto* riskcmd = app.add_subcommand("risk", "risk/reliability calculus");
  std::string risk_values;
  std::string risk_out;
  double risk_alpha = 0.9;
  auto* risk_eval = riskcmd->add_subcommand("eval", "evaluate risk metrics of a values CSV");
  risk_eval->add_option("values", risk_values, "CSV with value[,weight] rows")->required();
  risk_eval->add_option("--alpha", risk_alpha, "reliability level in (0,1)");
  risk_eval->add_option("--out", risk_out, "output directory for risk_metrics.csv");

  auto* optimize = app.add_subcommand("optimize", "run the staged approximation loop");
  add_common(optimize, opt_opts);

  auto* verify = app.add_subcommand("verify", "run the verification battery");
  add_common(verify, verify_opts);

  auto* epi = app.add_subcommand("epi-demo", "optimality-gap demo on synthetic problems");
  add_common(epi, epi_opts);

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return run_command(solve_opts, &ouu_cmd_solve_pde);
  if (field->parsed()) return run_command(field_opts, &ouu_cmd_sample_field);
  if (optimize->parsed()) return run_command(opt_opts, &ouu_cmd_optimize);
  if (verify->parsed()) return run_command(verify_opts, &ouu_cmd_verify);
  if (epi->parsed()) return run_command(epi_opts, &ouu_cmd_epi_demo);
  if (riskcmd->parsed()) {
    if (!risk_eval->parsed()) {
      std::fprintf(stderr, "error: 'risk' needs the 'eval' subcommand\n");
      return OUU_CONFIG_ERROR;
    }
    const char* message = nullptr;
    const ouu_status st = ouu_risk_eval_csv(risk_values.c_str(), risk_alpha,
                                            risk_out.empty() ? nullptr : risk_out.c_str(),
                                            &message);
    if (message && *message) std::printf("%s\n", message);
    if (st != OUU_OK) std::fprintf(stderr, "error (%d): %s\n", st, ouu_last_error());
    return st;
  }
  return OUU_CONFIG_ERROR;
}
