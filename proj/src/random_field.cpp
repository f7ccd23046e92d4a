#include "ouu/random_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ouu/errors.hpp"
#include "ouu/rng.hpp"

namespace ouu {

bool FieldSpec::piecewise_constant_modes() const {
  if (!b0.is_piecewise_constant()) return false;
  for (const auto& m : modes)
    if (!m.is_piecewise_constant()) return false;
  return true;
}

namespace {

// Exponent of the field at x for coordinates y.
double log_field(const FieldSpec& spec, const std::vector<double>& y, double x) {
  double s = spec.b0(x);
  for (size_t j = 0; j < y.size(); ++j) s += spec.modes[j](x) * y[j];
  return s;
}

struct ExponentRange {
  double lo, hi;
  bool exact;
};

ExponentRange exponent_range(const FieldSpec& spec, const std::vector<double>& y) {
  if (spec.piecewise_constant_modes()) {
    // Union of all declared partitions; the exponent is constant on each
    // piece, so evaluating one interior point per piece is exact.
    std::set<double> cuts{spec.domain.a, spec.domain.b};
    auto add_cuts = [&](const ScalarField& f) {
      for (double b : f.breakpoints())
        if (b > spec.domain.a && b < spec.domain.b) cuts.insert(b);
    };
    add_cuts(spec.b0);
    for (const auto& m : spec.modes) add_cuts(m);
    std::vector<double> pts(cuts.begin(), cuts.end());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      const double v = log_field(spec, y, 0.5 * (pts[i] + pts[i + 1]));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi, true};
  }
  // Grid fallback: dense evaluation including endpoints, then a
  // documented inflation of the resulting bounds.
  const int n = std::max(2, spec.bound_grid_cells);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i <= n; ++i) {
    const double x = spec.domain.a + spec.domain.length() * i / n;
    const double v = log_field(spec, y, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi, false};
}

}  // namespace

FieldSample::FieldSample(std::shared_ptr<const FieldSpec> spec, std::vector<double> y)
    : spec_(std::move(spec)), y_(std::move(y)) {
  if (!spec_) throw std::invalid_argument("null field spec");
  if (static_cast<int>(y_.size()) != spec_->truncation())
    throw std::invalid_argument("coordinate vector does not match truncation order");
  for (double v : y_)
    if (!std::isfinite(v)) throw NumericalError("nonfinite field coordinate");
  const ExponentRange r = exponent_range(*spec_, y_);
  bounds_exact_ = r.exact;
  if (r.exact) {
    c_lower_ = std::exp(r.lo);
    c_upper_ = std::exp(r.hi);
  } else {
    c_lower_ = std::exp(r.lo) / spec_->bound_inflation;
    c_upper_ = std::exp(r.hi) * spec_->bound_inflation;
  }
  if (!(c_lower_ > 0.0) || !std::isfinite(c_upper_))
    throw NumericalError("field sample bounds out of range");
}

double FieldSample::log_value(double x) const { return log_field(*spec_, y_, x); }

double FieldSample::operator()(double x) const { return std::exp(log_value(x)); }

FieldSample sample_field(std::shared_ptr<const FieldSpec> spec, std::uint64_t seed) {
  if (!spec) throw std::invalid_argument("null field spec");
  std::vector<double> y(static_cast<size_t>(spec->truncation()));
  for (size_t j = 0; j < y.size(); ++j)
    y[j] = rng::normal_draw(seed, static_cast<std::uint64_t>(j));
  return FieldSample(std::move(spec), std::move(y));
}

std::vector<FieldSample> sample_batch(std::shared_ptr<const FieldSpec> spec, std::uint64_t seed,
                                      std::uint64_t stream, std::uint64_t first_index, int count) {
  std::vector<FieldSample> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(
        sample_field(spec, rng::derive_seed(seed, stream, first_index + static_cast<std::uint64_t>(i))));
  return out;
}

ProbeEstimate integrability_probe(std::shared_ptr<const FieldSpec> spec, double p, double q,
                                  int n_mc, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
  if (q < 0.0 || q > 3.0) throw std::invalid_argument("q must lie in [0, 3]");
  if (n_mc < 1) throw std::invalid_argument("n_mc must be positive");
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const FieldSample s =
        sample_field(spec, rng::derive_seed(seed, rng::kStreamProbe, static_cast<std::uint64_t>(i)));
    const double r = std::pow(s.upper_bound(), p) / std::pow(s.lower_bound(), q);
    if (!std::isfinite(r)) {
      std::ostringstream msg;
      msg << "nonfinite integrability sample at index " << i;
      throw NumericalError(msg.str());
    }
    sum += r;
    sum2 += r * r;
  }
  ProbeEstimate est;
  est.n = n_mc;
  est.mean = sum / n_mc;
  const double var = std::max(0.0, sum2 / n_mc - est.mean * est.mean);
  est.standard_error = (n_mc > 1) ? std::sqrt(var / (n_mc - 1)) : 0.0;
  return est;
}

}  // namespace ouu
