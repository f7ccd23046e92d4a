#include "ouu/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ouu::risk {

DiscreteRv DiscreteRv::uniform(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empty random variable");
  const double w = 1.0 / static_cast<double>(values.size());
  DiscreteRv rv{std::move(values), std::vector<double>(0)};
  rv.weights.assign(rv.values.size(), w);
  return rv;
}

void DiscreteRv::validate() const {
  if (values.empty()) throw std::invalid_argument("empty random variable");
  if (values.size() != weights.size())
    throw std::invalid_argument("values/weights size mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("nonfinite value");
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    sum += weights[i];
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to one");
}

double DiscreteRv::mean() const {
  double m = 0.0;
  for (size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
  return m;
}

double smax(double gamma, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  // max(0,g) + beta*log1p(exp(-|g|/beta)): exact for large |g|/beta.
  const double t = gamma / beta;
  return std::max(gamma, 0.0) + beta * std::log1p(std::exp(-std::fabs(t)));
}

double smax_grad(double gamma, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const double t = gamma / beta;
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

struct SortedRv {
  std::vector<double> values;   // ascending
  std::vector<double> weights;  // matched
};

SortedRv sorted(const DiscreteRv& rv) {
  std::vector<size_t> idx(rv.values.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return rv.values[a] < rv.values[b]; });
  SortedRv s;
  s.values.reserve(idx.size());
  s.weights.reserve(idx.size());
  for (size_t i : idx) {
    s.values.push_back(rv.values[i]);
    s.weights.push_back(rv.weights[i]);
  }
  return s;
}

double quantile_sorted(const SortedRv& s, double alpha) {
  double cum = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    cum += s.weights[i];
    if (cum >= alpha) return s.values[i];
  }
  return s.values.back();
}

}  // namespace

double quantile(const DiscreteRv& rv, double alpha) {
  rv.validate();
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
  return quantile_sorted(sorted(rv), alpha);
}

double superquantile(const DiscreteRv& rv, double alpha) {
  rv.validate();
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  const SortedRv s = sorted(rv);
  // The minimization form gamma + E[max(0, X-gamma)]/(1-alpha) attains
  // its minimum at the alpha-quantile; evaluate it there.
  const double g = quantile_sorted(s, alpha);
  double tail = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i)
    if (s.values[i] > g) tail += s.weights[i] * (s.values[i] - g);
  return g + tail / (1.0 - alpha);
}

double penalty_regret(const DiscreteRv& rv, double alpha) {
  rv.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  double pos = 0.0;
  for (size_t i = 0; i < rv.values.size(); ++i)
    if (rv.values[i] > 0.0) pos += rv.weights[i] * rv.values[i];
  return pos / (1.0 - alpha);
}

double buffered_probability(const DiscreteRv& rv) {
  rv.validate();
  double prob_pos = 0.0;
  double scale = 0.0;
  for (size_t i = 0; i < rv.values.size(); ++i) {
    if (rv.values[i] > 0.0) prob_pos += rv.weights[i];
    scale = std::max(scale, std::fabs(rv.values[i]));
  }
  if (prob_pos == 0.0) return 0.0;
  if (rv.mean() >= 0.0) return 1.0;

  // E[X] < 0 < max X: the superquantile is strictly increasing through
  // zero, so bisection on alpha finds the root. Left-biased: equality
  // sends the search left, picking the smallest root.
  const SortedRv s = sorted(rv);
  auto sq = [&](double alpha) {
    const double g = quantile_sorted(s, alpha);
    double tail = 0.0;
    for (size_t i = 0; i < s.values.size(); ++i)
      if (s.values[i] > g) tail += s.weights[i] * (s.values[i] - g);
    return g + tail / (1.0 - alpha);
  };
  const double tol = 1e-10 * std::max(1.0, scale);
  double lo = 1e-12, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = sq(mid);
    if (std::fabs(v) <= tol) {
      hi = mid;
      if (hi - lo <= 1e-12) break;
      continue;
    }
    if (v >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 1.0 - hi;
}

}  // namespace ouu::risk
