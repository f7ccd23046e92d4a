#ifndef OUU_TRIDIAG_HPP
#define OUU_TRIDIAG_HPP

#include <vector>

namespace ouu {

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct TridiagMatrix {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// LDL^T factorization of a symmetric positive definite tridiagonal
/// matrix. Factorization fails with NumericalError if any pivot is
/// not strictly positive, which certifies the SPD property.
class TridiagFactor {
public:
  explicit TridiagFactor(const TridiagMatrix& m);

  std::vector<double> solve(std::vector<double> rhs) const;
  double min_pivot() const { return min_pivot_; }

private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers
  double min_pivot_ = 0.0;
};

}  // namespace ouu

#endif
