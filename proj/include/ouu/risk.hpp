#ifndef OUU_RISK_HPP
#define OUU_RISK_HPP

#include <vector>

namespace ouu::risk {

/// Finitely supported random variable. Weights must be positive and sum
/// to one within 1e-12.
struct DiscreteRv {
  std::vector<double> values;
  std::vector<double> weights;

  /// Equal weights 1/n.
  static DiscreteRv uniform(std::vector<double> values);

  void validate() const;
  double mean() const;
};

/// Smooth surrogate for max{0, gamma}:  beta * ln(1 + exp(gamma/beta)).
/// Always overestimates, by at most 2*beta; evaluated in shifted log1p
/// form so large |gamma|/beta stays exact.
double smax(double gamma, double beta);

/// d/dgamma smax = logistic(gamma/beta), in (0, 1).
double smax_grad(double gamma, double beta);

/// Left-continuous generalized inverse of the CDF: smallest value v with
/// P(X <= v) >= alpha.
double quantile(const DiscreteRv& rv, double alpha);

/// alpha-superquantile (CVaR) via the minimization formula
///   min_gamma gamma + E[max(0, X - gamma)]/(1 - alpha),
/// whose discrete minimum is attained at the alpha-quantile.
/// alpha in [0, 1); alpha = 0 gives the mean.
double superquantile(const DiscreteRv& rv, double alpha);

/// E[max(0, X)] / (1 - alpha), alpha in (0, 1).
double penalty_regret(const DiscreteRv& rv, double alpha);

/// Buffered failure probability of the event {X > 0}:
///   0                 if P(X > 0) = 0,
///   1                 if P(X > 0) > 0 and E[X] >= 0,
///   1 - alpha*        otherwise, where superquantile(X, alpha*) = 0.
/// The root alpha* is located by left-biased bisection (tolerance 1e-10
/// in the superquantile value).
double buffered_probability(const DiscreteRv& rv);

}  // namespace ouu::risk

#endif
