#ifndef OUU_RANDOM_FIELD_HPP
#define OUU_RANDOM_FIELD_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "ouu/mesh.hpp"
#include "ouu/scalar_field.hpp"

namespace ouu {

/// Specification of the log-linear conductivity field
///   xi(x) = exp(b0(x) + sum_j b_j(x) y_j),  y_j iid standard normal.
struct FieldSpec {
  Interval domain;
  ScalarField b0 = ScalarField::constant(0.0);
  std::vector<ScalarField> modes;

  /// Resolution of the bound-estimation grid used when some coefficient
  /// is not piecewise constant; bounds are then inflated by
  /// bound_inflation to stay conservative.
  int bound_grid_cells = 4096;
  double bound_inflation = 1.01;

  int truncation() const { return static_cast<int>(modes.size()); }
  /// True when b0 and every mode are piecewise constant, in which case
  /// essential bounds are exact.
  bool piecewise_constant_modes() const;
};

/// One realization of the field: mode coordinates y plus certified
/// essential bounds 0 < c_lower <= xi(x) <= c_upper on the closed domain.
class FieldSample {
public:
  FieldSample(std::shared_ptr<const FieldSpec> spec, std::vector<double> y);

  double operator()(double x) const;
  double log_value(double x) const;

  double lower_bound() const { return c_lower_; }
  double upper_bound() const { return c_upper_; }
  bool bounds_exact() const { return bounds_exact_; }

  const std::vector<double>& coords() const { return y_; }
  const FieldSpec& spec() const { return *spec_; }

private:
  std::shared_ptr<const FieldSpec> spec_;
  std::vector<double> y_;
  double c_lower_ = 0.0, c_upper_ = 0.0;
  bool bounds_exact_ = false;
};

/// Draw one sample. Deterministic: identical (spec, seed) give a
/// bit-identical coordinate vector.
FieldSample sample_field(std::shared_ptr<const FieldSpec> spec, std::uint64_t seed);

/// Draw samples index, index+1, ..., index+count-1 of a stream. Sample i
/// depends only on (seed, stream, i), so an extended batch reproduces
/// its prefix (nested sampling).
std::vector<FieldSample> sample_batch(std::shared_ptr<const FieldSpec> spec, std::uint64_t seed,
                                      std::uint64_t stream, std::uint64_t first_index, int count);

struct ProbeEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int n = 0;
};

/// Monte Carlo estimate of E[c_upper^p / c_lower^q], the integrability
/// diagnostic for the field bounds; p in [0,1], q in [0,3].
ProbeEstimate integrability_probe(std::shared_ptr<const FieldSpec> spec, double p, double q,
                                  int n_mc, std::uint64_t seed);

}  // namespace ouu

#endif
