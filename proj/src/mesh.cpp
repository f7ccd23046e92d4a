#include "ouu/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ouu {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
  for (size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_[i] < nodes_[i + 1]))
      throw std::invalid_argument("mesh nodes must be strictly increasing");
  }
  h_ = 0.0;
  for (size_t i = 0; i + 1 < nodes_.size(); ++i) h_ = std::max(h_, nodes_[i + 1] - nodes_[i]);
}

Mesh Mesh::uniform(int n_elements, Interval domain) {
  if (n_elements < 1) throw std::invalid_argument("n_elements must be positive");
  if (!(domain.a < domain.b)) throw std::invalid_argument("domain interval is empty");
  const double h = domain.length() / n_elements;
  std::vector<double> nodes(static_cast<size_t>(n_elements) + 1);
  for (int i = 0; i <= n_elements; ++i) nodes[static_cast<size_t>(i)] = domain.a + i * h;
  nodes.back() = domain.b;
  Mesh m(std::move(nodes));
  m.h_ = h;  // exactly |domain| / n_elements
  return m;
}

int Mesh::element_of(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  int idx = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(idx, 0, n_elements() - 1);
}

double p0_eval(const Mesh& mesh, const P0Control& z, double x) {
  if (static_cast<int>(z.coeffs.size()) != mesh.n_elements())
    throw std::invalid_argument("control size does not match mesh");
  return z.coeffs[static_cast<size_t>(mesh.element_of(x))];
}

double p1_eval(const Mesh& mesh, const P1State& u, double x) {
  if (static_cast<int>(u.values.size()) != mesh.n_nodes())
    throw std::invalid_argument("state size does not match mesh");
  const int e = mesh.element_of(x);
  const double xl = mesh.node(e), xr = mesh.node(e + 1);
  const double t = (x - xl) / (xr - xl);
  return (1.0 - t) * u.values[static_cast<size_t>(e)] + t * u.values[static_cast<size_t>(e) + 1];
}

double embed_control_norm(const Mesh& mesh, const P0Control& z) {
  if (static_cast<int>(z.coeffs.size()) != mesh.n_elements())
    throw std::invalid_argument("control size does not match mesh");
  double s = 0.0;
  for (int i = 0; i < mesh.n_elements(); ++i)
    s += z.coeffs[static_cast<size_t>(i)] * z.coeffs[static_cast<size_t>(i)] *
         mesh.element_length(i);
  return std::sqrt(s);
}

double l2_norm(const Mesh& mesh, const P1State& u) {
  double s = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double a = u.values[static_cast<size_t>(e)], b = u.values[static_cast<size_t>(e) + 1];
    s += mesh.element_length(e) * (a * a + a * b + b * b) / 3.0;
  }
  return std::sqrt(s);
}

double h1_seminorm(const Mesh& mesh, const P1State& u) {
  double s = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double d = u.values[static_cast<size_t>(e) + 1] - u.values[static_cast<size_t>(e)];
    s += d * d / mesh.element_length(e);
  }
  return std::sqrt(s);
}

double v_norm(const Mesh& mesh, const P1State& u) { return l2_norm(mesh, u) + h1_seminorm(mesh, u); }

namespace {
// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};
}  // namespace

double l2_error(const Mesh& mesh, const P1State& u, const std::function<double(double)>& exact) {
  double s = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.node(e), xr = mesh.node(e + 1);
    const double mid = 0.5 * (xl + xr), half = 0.5 * (xr - xl);
    const double ul = u.values[static_cast<size_t>(e)], ur = u.values[static_cast<size_t>(e) + 1];
    for (int q = 0; q < 5; ++q) {
      const double x = mid + half * kGx[q];
      const double t = (x - xl) / (xr - xl);
      const double uh = (1.0 - t) * ul + t * ur;
      const double d = uh - exact(x);
      s += half * kGw[q] * d * d;
    }
  }
  return std::sqrt(s);
}

std::vector<double> mass_apply(const Mesh& mesh, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != mesh.n_nodes())
    throw std::invalid_argument("vector size does not match mesh");
  std::vector<double> out(v.size(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double h = mesh.element_length(e);
    const double a = v[static_cast<size_t>(e)], b = v[static_cast<size_t>(e) + 1];
    out[static_cast<size_t>(e)] += h * (2.0 * a + b) / 6.0;
    out[static_cast<size_t>(e) + 1] += h * (a + 2.0 * b) / 6.0;
  }
  return out;
}

std::vector<double> window_load(const Mesh& mesh, Interval window) {
  std::vector<double> out(static_cast<size_t>(mesh.n_nodes()), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.node(e), xr = mesh.node(e + 1);
    const double p = std::max(xl, window.a), q = std::min(xr, window.b);
    if (q <= p) continue;
    const double he = xr - xl;
    // phi_e is linear on the element; the trapezoid value is exact.
    auto phi_left = [&](double x) { return (xr - x) / he; };
    out[static_cast<size_t>(e)] += 0.5 * (q - p) * (phi_left(p) + phi_left(q));
    out[static_cast<size_t>(e) + 1] += 0.5 * (q - p) * (2.0 - phi_left(p) - phi_left(q));
  }
  return out;
}

P1State p1_interpolate(const Mesh& from, const P1State& u, const Mesh& to) {
  P1State out = P1State::zeros(to.n_nodes());
  for (int i = 0; i < to.n_nodes(); ++i)
    out.values[static_cast<size_t>(i)] = p1_eval(from, u, to.node(i));
  return out;
}

}  // namespace ouu
