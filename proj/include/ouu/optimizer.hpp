#ifndef OUU_OPTIMIZER_HPP
#define OUU_OPTIMIZER_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ouu/saa.hpp"

namespace ouu::opt {

struct StageParams {
  int nu = 1;              // sample size
  double beta = 0.05;      // smoothing scale (buffered mode)
  double theta_pen = 1.0;  // penalty weight (buffered mode)
  double delta = 1e-6;     // inner stationarity tolerance
  int max_inner_iters = 500;
};

enum class MultiplierRule { FixedZero, AugmentedLagrangian };

/// Outer schedule: sample sizes nondecreasing, smoothing nonincreasing,
/// penalty nondecreasing, tolerances nonincreasing. Stage k reuses stage
/// k-1's samples plus fresh ones (nested draws).
struct Schedule {
  std::vector<StageParams> stages;
  MultiplierRule multiplier_rule = MultiplierRule::AugmentedLagrangian;
  double y_max = 1e6;  // multiplier clamp keeping {y} bounded

  void validate() const;
};

struct InnerResult {
  saa::ControlPoint point;
  double value = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

/// One row of the inner-iteration trace.
struct TracePoint {
  int stage = 0;
  int iteration = 0;
  double value = 0.0;
  double residual = 0.0;
  double gradient_norm = 0.0;
};

struct StageRecord {
  int nu = 0;
  double beta = 0.0;
  double theta_pen = 0.0;
  double y = 0.0;  // multiplier used during the stage
  double value = 0.0;
  double residual_smooth = 0.0;
  double residual_nonsmooth = 0.0;
  double smoothing_budget = 0.0;  // 2*beta/(1-alpha)
  double delta = 0.0;
  int inner_iters = 0;
  bool converged = false;
  bool failed = false;
  std::string note;
};

/// Record of the staged run: the per-stage approximate values and the
/// bookkeeping needed for the eps + delta optimality-gap reading.
struct GapCertificate {
  std::vector<StageRecord> stages;
  saa::ControlPoint final_point;
  double delta_limit = 0.0;
  saa::ObjectiveMode mode = saa::ObjectiveMode::Expectation;

  // Held-out re-evaluation at the final point (independent sample).
  int nu_ref = 0;
  double ref_value = 0.0;        // objective estimate (nonsmooth form)
  double ref_value_se = 0.0;
  double ref_residual = 0.0;     // nonsmooth psi-hat estimate
  double ref_residual_se = 0.0;
};

/// Clamp z to its box and sigma to [0, inf); gamma unconstrained.
saa::ControlPoint project_box(saa::ControlPoint point);

/// Projected gradient with Armijo backtracking; stops when the
/// projected-gradient norm falls below delta * (1 + |value|). Descent is
/// monotone; on line-search failure the best iterate is returned with a
/// warning flag.
InnerResult inner_solve(const saa::SaaProblem& problem, const saa::ControlPoint& start,
                        double delta, int max_iters, std::vector<TracePoint>* trace = nullptr,
                        int stage_index = 0);

/// Augmented Lagrangian multiplier step y + 2 * theta_pen * residual,
/// clamped to [-y_max, y_max].
double multiplier_update(double y, double theta_pen, double residual, double y_max);

/// Inputs of the staged outer loop that are held fixed across stages.
struct OuterInputs {
  Mesh mesh = Mesh::uniform(1, {0.0, 1.0});
  Mesh control_mesh = Mesh::uniform(1, {0.0, 1.0});
  fem::PdeData pde;
  saa::QoiSpec qoi;
  double theta_reg = 0.0;
  saa::ObjectiveMode mode = saa::ObjectiveMode::Expectation;
  std::shared_ptr<const FieldSpec> field;
  std::uint64_t seed = 0;
  int threads = 1;
  saa::ControlPoint start;
  int nu_ref = 10000;  // held-out sample size for the certificate
};

/// Staged approximation loop: runs the schedule in order, warm-starting
/// each stage from the previous iterate, records the approximate value
/// per stage, and finishes with the held-out re-evaluation.
GapCertificate outer_loop(const OuterInputs& inputs, const Schedule& schedule,
                          std::vector<TracePoint>* trace = nullptr);

}  // namespace ouu::opt

#endif
