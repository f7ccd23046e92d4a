#include "ouu/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ouu {

ScalarField ScalarField::constant(double value) {
  ScalarField f;
  f.kind_ = Kind::Constant;
  f.values_ = {value};
  return f;
}

ScalarField ScalarField::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1)
    throw std::invalid_argument("piecewise field needs values.size()+1 breakpoints");
  if (values.empty()) throw std::invalid_argument("piecewise field needs at least one piece");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("piecewise breakpoints must be strictly increasing");
  ScalarField f;
  f.kind_ = Kind::Piecewise;
  f.breakpoints_ = std::move(breakpoints);
  f.values_ = std::move(values);
  return f;
}

ScalarField ScalarField::sine(double amplitude, double omega, double phase) {
  ScalarField f;
  f.kind_ = Kind::Sine;
  f.amplitude_ = amplitude;
  f.omega_ = omega;
  f.phase_ = phase;
  return f;
}

ScalarField ScalarField::cosine(double amplitude, double omega, double phase) {
  ScalarField f;
  f.kind_ = Kind::Cosine;
  f.amplitude_ = amplitude;
  f.omega_ = omega;
  f.phase_ = phase;
  return f;
}

double ScalarField::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return values_[0];
    case Kind::Piecewise: {
      // Clamp to the end pieces so the field is defined on the closure.
      if (x <= breakpoints_.front()) return values_.front();
      if (x >= breakpoints_.back()) return values_.back();
      auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
      size_t idx = static_cast<size_t>(it - breakpoints_.begin()) - 1;
      if (idx >= values_.size()) idx = values_.size() - 1;
      return values_[idx];
    }
    case Kind::Sine:
      return amplitude_ * std::sin(omega_ * x + phase_);
    case Kind::Cosine:
      return amplitude_ * std::cos(omega_ * x + phase_);
  }
  return 0.0;
}

}  // namespace ouu
