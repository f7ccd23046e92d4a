#include "ouu/tridiag.hpp"

#include <sstream>
#include <stdexcept>

#include "ouu/errors.hpp"

namespace ouu {

std::vector<double> TridiagMatrix::apply(const std::vector<double>& x) const {
  const int n = size();
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double v = diag[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    if (i > 0) v += off[static_cast<size_t>(i) - 1] * x[static_cast<size_t>(i) - 1];
    if (i + 1 < n) v += off[static_cast<size_t>(i)] * x[static_cast<size_t>(i) + 1];
    y[static_cast<size_t>(i)] = v;
  }
  return y;
}

TridiagFactor::TridiagFactor(const TridiagMatrix& m) {
  const int n = m.size();
  if (n < 1) throw std::invalid_argument("empty tridiagonal system");
  if (static_cast<int>(m.off.size()) != n - 1)
    throw std::invalid_argument("off-diagonal size mismatch");
  d_.resize(static_cast<size_t>(n));
  l_.assign(static_cast<size_t>(n > 0 ? n - 1 : 0), 0.0);
  d_[0] = m.diag[0];
  min_pivot_ = d_[0];
  for (int i = 1; i < n; ++i) {
    const double prev = d_[static_cast<size_t>(i) - 1];
    if (!(prev > 0.0)) {
      std::ostringstream msg;
      msg << "assembled system is not positive definite (pivot " << prev << " at row " << i - 1
          << ")";
      throw NumericalError(msg.str());
    }
    const double li = m.off[static_cast<size_t>(i) - 1] / prev;
    l_[static_cast<size_t>(i) - 1] = li;
    d_[static_cast<size_t>(i)] = m.diag[static_cast<size_t>(i)] - li * li * prev;
    if (d_[static_cast<size_t>(i)] < min_pivot_) min_pivot_ = d_[static_cast<size_t>(i)];
  }
  if (!(d_[static_cast<size_t>(n) - 1] > 0.0)) {
    std::ostringstream msg;
    msg << "assembled system is not positive definite (pivot " << d_[static_cast<size_t>(n) - 1]
        << " at row " << n - 1 << ")";
    throw NumericalError(msg.str());
  }
}

std::vector<double> TridiagFactor::solve(std::vector<double> rhs) const {
  const int n = static_cast<int>(d_.size());
  if (static_cast<int>(rhs.size()) != n) throw std::invalid_argument("rhs size mismatch");
  // L y = rhs
  for (int i = 1; i < n; ++i)
    rhs[static_cast<size_t>(i)] -= l_[static_cast<size_t>(i) - 1] * rhs[static_cast<size_t>(i) - 1];
  // D z = y
  for (int i = 0; i < n; ++i) rhs[static_cast<size_t>(i)] /= d_[static_cast<size_t>(i)];
  // L^T x = z
  for (int i = n - 2; i >= 0; --i)
    rhs[static_cast<size_t>(i)] -= l_[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i) + 1];
  return rhs;
}

}  // namespace ouu
