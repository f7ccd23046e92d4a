/* C API of the PDE-constrained optimization-under-uncertainty library.
 *
 * The library core is C++; this surface exposes it behind opaque
 * handles and status codes so that it can be consumed from C, from
 * dlopen'ed plugins, and by the bundled CLI. All functions are
 * thread-compatible: distinct handles may be used concurrently, the
 * stateless kernels are reentrant, and error messages are kept in
 * thread-local storage.
 */
#ifndef OUU_C_H
#define OUU_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OUU_API __declspec(dllexport)
#else
#define OUU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes in the CLI. */
typedef enum ouu_status {
  OUU_OK = 0,
  OUU_CHECK_FAILED = 1,    /* a verification/feasibility check failed */
  OUU_CONFIG_ERROR = 2,    /* malformed config or invalid arguments   */
  OUU_NUMERICAL_ERROR = 3  /* solver or sampling failure              */
} ouu_status;

/* Opaque experiment handle: a parsed + validated configuration. */
typedef struct ouu_experiment ouu_experiment;

OUU_API const char* ouu_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
OUU_API const char* ouu_last_error(void);

/* Message produced by the most recent command on this handle. */
OUU_API const char* ouu_experiment_message(const ouu_experiment* exp);

OUU_API ouu_status ouu_experiment_open(const char* config_path, ouu_experiment** out);
OUU_API ouu_status ouu_experiment_open_json(const char* json_text, ouu_experiment** out);
OUU_API void ouu_experiment_close(ouu_experiment* exp);

/* Optional overrides applied to subsequent commands. */
OUU_API ouu_status ouu_experiment_set_output_dir(ouu_experiment* exp, const char* dir);
OUU_API ouu_status ouu_experiment_set_seed(ouu_experiment* exp, uint64_t seed);
OUU_API ouu_status ouu_experiment_set_threads(ouu_experiment* exp, int32_t threads);

/* Commands; artifacts are written under the configured output dir. */
OUU_API ouu_status ouu_cmd_solve_pde(ouu_experiment* exp);
OUU_API ouu_status ouu_cmd_sample_field(ouu_experiment* exp);
OUU_API ouu_status ouu_cmd_optimize(ouu_experiment* exp);
OUU_API ouu_status ouu_cmd_verify(ouu_experiment* exp);
OUU_API ouu_status ouu_cmd_epi_demo(ouu_experiment* exp);

/* Risk metrics of a values CSV (value[,weight] rows); out_dir may be
 * NULL for a report-only run. The report is returned through *message
 * (owned by thread-local storage, valid until the next call). */
OUU_API ouu_status ouu_risk_eval_csv(const char* values_csv, double alpha, const char* out_dir,
                                     const char** message);

/* Stateless numeric kernels. */
OUU_API double ouu_smax(double gamma, double beta);
OUU_API double ouu_smax_grad(double gamma, double beta);

/* weights may be NULL for the uniform law. */
OUU_API ouu_status ouu_superquantile(const double* values, const double* weights, int64_t n,
                                     double alpha, double* out);
OUU_API ouu_status ouu_buffered_probability(const double* values, const double* weights,
                                            int64_t n, double* out);
OUU_API ouu_status ouu_penalty_regret(const double* values, const double* weights, int64_t n,
                                      double alpha, double* out);

#ifdef __cplusplus
}
#endif

#endif /* OUU_C_H */
