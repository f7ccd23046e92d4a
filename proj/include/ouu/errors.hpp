#ifndef OUU_ERRORS_HPP
#define OUU_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ouu {

/// Raised when an assembled or sampled quantity is numerically unusable
/// (non-SPD system, nonfinite Monte Carlo draw, failed linear solve).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised on malformed or inconsistent experiment configuration input.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ouu

#endif
