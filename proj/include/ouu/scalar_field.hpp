#ifndef OUU_SCALAR_FIELD_HPP
#define OUU_SCALAR_FIELD_HPP

#include <vector>

namespace ouu {

/// Coefficient function on the closure of the domain. Restricted to a
/// small whitelist so that essential bounds stay computable: constants,
/// piecewise constants on a declared partition, and sin/cos modes.
class ScalarField {
public:
  enum class Kind { Constant, Piecewise, Sine, Cosine };

  static ScalarField constant(double value);
  /// breakpoints: strictly increasing, size values.size()+1; the pieces
  /// must cover the domain the field is used on.
  static ScalarField piecewise(std::vector<double> breakpoints, std::vector<double> values);
  /// amplitude * sin(omega * x + phase)
  static ScalarField sine(double amplitude, double omega, double phase = 0.0);
  static ScalarField cosine(double amplitude, double omega, double phase = 0.0);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  /// True for constants and piecewise constants: exact range available.
  bool is_piecewise_constant() const {
    return kind_ == Kind::Constant || kind_ == Kind::Piecewise;
  }

  /// Interior breakpoints (empty for constants and analytic modes).
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double amplitude() const { return amplitude_; }
  double omega() const { return omega_; }
  double phase() const { return phase_; }

private:
  ScalarField() = default;

  Kind kind_ = Kind::Constant;
  std::vector<double> breakpoints_;  // Piecewise only
  std::vector<double> values_;       // Piecewise; Constant keeps one entry
  double amplitude_ = 0.0, omega_ = 0.0, phase_ = 0.0;
};

}  // namespace ouu

#endif
