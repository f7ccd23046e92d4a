#include "ouu/fem.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ouu/errors.hpp"

namespace ouu::fem {

ControlCoupling::ControlCoupling(const Mesh& state_mesh, const Mesh& control_mesh,
                                 const ScalarField& c1) {
  if (!c1.is_piecewise_constant())
    throw std::invalid_argument("c1 must be piecewise constant for exact load assembly");
  if (state_mesh.domain().a != control_mesh.domain().a ||
      state_mesh.domain().b != control_mesh.domain().b)
    throw std::invalid_argument("state and control meshes must share the domain");
  n_nodes_ = state_mesh.n_nodes();
  n_controls_ = control_mesh.n_elements();

  // Merge all breakpoints; on each piece c1 * psi_i is constant and the
  // hat functions are linear, so trapezoid values are exact.
  std::set<double> cuts(state_mesh.nodes().begin(), state_mesh.nodes().end());
  cuts.insert(control_mesh.nodes().begin(), control_mesh.nodes().end());
  const Interval dom = state_mesh.domain();
  for (double b : c1.breakpoints())
    if (b > dom.a && b < dom.b) cuts.insert(b);
  std::vector<double> pts(cuts.begin(), cuts.end());

  for (size_t s = 0; s + 1 < pts.size(); ++s) {
    const double p = pts[s], q = pts[s + 1];
    const double mid = 0.5 * (p + q);
    if (mid <= dom.a || mid >= dom.b) continue;
    const int e = state_mesh.element_of(mid);
    const int i = control_mesh.element_of(mid);
    const double xl = state_mesh.node(e), xr = state_mesh.node(e + 1);
    const double he = xr - xl;
    const double c = c1(mid);
    if (c == 0.0) continue;
    const double phl_p = (xr - p) / he, phl_q = (xr - q) / he;
    const double w_left = c * 0.5 * (q - p) * (phl_p + phl_q);
    const double w_right = c * 0.5 * (q - p) * (2.0 - phl_p - phl_q);
    entries_.push_back({e, i, w_left});
    entries_.push_back({e + 1, i, w_right});
  }
}

std::vector<double> ControlCoupling::apply(const P0Control& z) const {
  if (static_cast<int>(z.coeffs.size()) != n_controls_)
    throw std::invalid_argument("control size does not match coupling");
  std::vector<double> out(static_cast<size_t>(n_nodes_), 0.0);
  for (const Entry& en : entries_)
    out[static_cast<size_t>(en.node)] += en.weight * z.coeffs[static_cast<size_t>(en.elem)];
  return out;
}

std::vector<double> ControlCoupling::apply_transpose(const P1State& p) const {
  if (static_cast<int>(p.values.size()) != n_nodes_)
    throw std::invalid_argument("state size does not match coupling");
  std::vector<double> out(static_cast<size_t>(n_controls_), 0.0);
  for (const Entry& en : entries_)
    out[static_cast<size_t>(en.elem)] += en.weight * p.values[static_cast<size_t>(en.node)];
  return out;
}

namespace {

TridiagMatrix assemble_robin(const Mesh& mesh, const FieldSample& xi, const PdeData& data) {
  if (!(xi.lower_bound() > 0.0))
    throw NumericalError("field sample is not strictly positive on the domain");
  if (data.c2[0] < 0.0 || data.c2[1] < 0.0)
    throw std::invalid_argument("Robin coefficients must be nonnegative");
  if (data.c2[0] == 0.0 && data.c2[1] == 0.0)
    throw std::invalid_argument(
        "both Robin coefficients vanish: the operator loses coercivity in the constant "
        "direction; set c2 > 0 at one endpoint");

  const int n = mesh.n_nodes();
  TridiagMatrix K;
  K.diag.assign(static_cast<size_t>(n), 0.0);
  K.off.assign(static_cast<size_t>(n) - 1, 0.0);
  // 2-point Gauss per element for the xi-weighted stiffness term.
  const double g = 1.0 / std::sqrt(3.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.node(e), xr = mesh.node(e + 1);
    const double he = xr - xl, mid = 0.5 * (xl + xr), half = 0.5 * he;
    const double xi_int = half * (xi(mid - half * g) + xi(mid + half * g));
    const double k = xi_int / (he * he);
    K.diag[static_cast<size_t>(e)] += k;
    K.diag[static_cast<size_t>(e) + 1] += k;
    K.off[static_cast<size_t>(e)] -= k;
  }
  K.diag.front() += data.c2[0];
  K.diag.back() += data.c2[1];
  return K;
}

}  // namespace

RobinOperator::RobinOperator(const Mesh& mesh, const FieldSample& xi, const PdeData& data)
    : mesh_(mesh), matrix_(assemble_robin(mesh, xi, data)), factor_(matrix_) {
  boundary_load_.assign(static_cast<size_t>(mesh.n_nodes()), 0.0);
  boundary_load_.front() = data.c2[0] * data.s_e[0];
  boundary_load_.back() = data.c2[1] * data.s_e[1];
}

P1State RobinOperator::solve(const std::vector<double>& load) const {
  return P1State{factor_.solve(load)};
}

P1State solve_state(const Mesh& state_mesh, const FieldSample& xi, const PdeData& data,
                    const Mesh& control_mesh, const P0Control& z) {
  RobinOperator op(state_mesh, xi, data);
  ControlCoupling coupling(state_mesh, control_mesh, data.c1);
  std::vector<double> rhs = op.boundary_load();
  const std::vector<double> load = coupling.apply(z);
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += load[i];
  return op.solve(rhs);
}

P1State solve_state(const Mesh& mesh, const FieldSample& xi, const PdeData& data,
                    const P0Control& z) {
  return solve_state(mesh, xi, data, mesh, z);
}

P1State solve_adjoint(const Mesh& mesh, const FieldSample& xi, const PdeData& data,
                      const std::vector<double>& dual_load) {
  RobinOperator op(mesh, xi, data);
  return op.solve(dual_load);
}

double estimate_rate(const std::vector<std::pair<double, double>>& h_error) {
  if (h_error.size() < 3)
    throw std::invalid_argument("rate estimation needs at least three levels");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h_error.size());
  for (const auto& [h, err] : h_error) {
    if (!(h > 0.0) || !(err > 0.0))
      throw std::invalid_argument("mesh sizes and errors must be positive");
    const double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::fabs(denom) < 1e-300) throw std::invalid_argument("degenerate level set");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace ouu::fem
