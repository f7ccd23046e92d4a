#ifndef OUU_SAA_HPP
#define OUU_SAA_HPP

#include <limits>
#include <memory>
#include <vector>

#include "ouu/fem.hpp"
#include "ouu/mesh.hpp"
#include "ouu/random_field.hpp"
#include "ouu/risk.hpp"
#include "ouu/scalar_field.hpp"

namespace ouu::saa {

/// Quantities of interest attached to the PDE state:
///   g1(u) = integral over D of (u - s_d)^2     (tracking discrepancy)
///   g2(u) = s_t - integral over D_t of u       (average shortfall)
struct QoiSpec {
  ScalarField s_d = ScalarField::constant(0.0);
  Interval target_window{0.0, 1.0};
  double s_t = 0.0;
  double alpha = 0.9;  // reliability level in (0,1)
};

struct Box {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Optimization variables: P0 control coefficients plus the auxiliary
/// pair (gamma, sigma) of the buffered reformulation. sigma >= 0 and the
/// box on z define the admissible set.
struct ControlPoint {
  std::vector<double> z;
  double gamma = 0.0;
  double sigma = 0.0;
  Box box;

  bool feasible() const;
};

enum class ObjectiveMode { Expectation, Buffered };

/// Multiplier / penalty / smoothing parameters of the augmented
/// Lagrangian surrogate used in buffered mode.
struct AugLagParams {
  double multiplier = 0.0;  // y
  double penalty = 1.0;     // theta_pen > 0
  double beta = 0.05;       // smoothing scale > 0
};

/// Everything defining one sample-average objective.
struct SaaSpec {
  std::vector<FieldSample> samples;
  Mesh mesh = Mesh::uniform(1, {0.0, 1.0});
  Mesh control_mesh = Mesh::uniform(1, {0.0, 1.0});
  fem::PdeData pde;
  QoiSpec qoi;
  double theta_reg = 0.0;  // cost f(z) = theta_reg * ||z||_Z^2
  ObjectiveMode mode = ObjectiveMode::Expectation;
  AugLagParams al;
  int threads = 1;

  void validate() const;
};

double qoi_g1(const Mesh& mesh, const P1State& u, const QoiSpec& qoi);
double qoi_g2_raw(const Mesh& mesh, const P1State& u, const QoiSpec& qoi);

/// Smoothed per-sample buffered term
///   sigma + gamma + smax(g2raw - gamma; beta) / (1 - alpha),
/// within 2*beta/(1-alpha) of its nonsmooth counterpart.
double g2_buffered_smooth(double g2raw, double gamma, double sigma, double alpha, double beta);

struct Gradient {
  std::vector<double> z;
  double gamma = 0.0;
  double sigma = 0.0;

  double norm2() const;
};

struct Evaluation {
  double value = std::numeric_limits<double>::infinity();
  bool feasible = false;
  double w1 = 0.0;            // sample mean of g1
  double w2_smooth = 0.0;     // buffered residual with smax
  double w2_nonsmooth = 0.0;  // buffered residual with exact max
  Gradient gradient;          // filled only when requested
  bool has_gradient = false;
  std::vector<double> sample_g1;
  std::vector<double> sample_g2raw;  // buffered mode only
};

/// Objective evaluator bound to one SaaSpec; precomputes the coupling
/// operators shared by all samples. Value and gradient of one point
/// share the per-sample state solves and their factorizations.
class SaaProblem {
public:
  explicit SaaProblem(SaaSpec spec);

  const SaaSpec& spec() const { return spec_; }
  int dim() const;  // z entries plus (gamma, sigma) in buffered mode

  Evaluation evaluate(const ControlPoint& cp, bool with_gradient) const;

  double value(const ControlPoint& cp) const;
  Gradient gradient(const ControlPoint& cp) const;
  /// Constraint residual w2; exact max or smax per the flag.
  double feasibility_residual(const ControlPoint& cp, bool smooth) const;

private:
  SaaSpec spec_;
  fem::ControlCoupling coupling_;
  std::vector<double> neg_window_load_;  // dual load of g2
  std::vector<double> control_lengths_;  // |K_i| of the control mesh
};

/// Free-function forms of the evaluator.
double saa_value(const ControlPoint& cp, const SaaSpec& spec);
Gradient saa_gradient(const ControlPoint& cp, const SaaSpec& spec);
double feasibility_residual(const ControlPoint& cp, const SaaSpec& spec, bool smooth);

}  // namespace ouu::saa

#endif
