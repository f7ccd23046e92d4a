#ifndef OUU_FEM_HPP
#define OUU_FEM_HPP

#include <array>
#include <utility>
#include <vector>

#include "ouu/mesh.hpp"
#include "ouu/random_field.hpp"
#include "ouu/scalar_field.hpp"
#include "ouu/tridiag.hpp"

namespace ouu::fem {

/// Data of the Robin problem
///   -(xi u')' = c1 z   on (a,b),
///   xi u' . n = c2 (s_e - u) at the endpoints (n = -1 at a, +1 at b).
struct PdeData {
  ScalarField c1 = ScalarField::constant(1.0);  // source coupling, >= 0, piecewise constant
  std::array<double, 2> c2{1.0, 1.0};           // Robin coefficients at (a, b), >= 0
  std::array<double, 2> s_e{0.0, 0.0};          // exterior temperature at (a, b)
};

/// Exact load/pairing coupling between a P0 control space and a P1 state
/// space, B_{k,i} = integral of c1 * psi_i * phi_k. The two meshes may
/// differ; pieces are split at every breakpoint of either mesh and of c1.
class ControlCoupling {
public:
  ControlCoupling(const Mesh& state_mesh, const Mesh& control_mesh, const ScalarField& c1);

  /// Load vector b(z, phi_k) = B z.
  std::vector<double> apply(const P0Control& z) const;
  /// Per-control-element pairing integral of c1 * psi_i * p = B^T p.
  std::vector<double> apply_transpose(const P1State& p) const;

  int n_nodes() const { return n_nodes_; }
  int n_controls() const { return n_controls_; }

private:
  struct Entry {
    int node;
    int elem;
    double weight;
  };
  std::vector<Entry> entries_;
  int n_nodes_ = 0;
  int n_controls_ = 0;
};

/// Assembled Galerkin operator for one field realization: stiffness with
/// 2-point Gauss quadrature of the xi-weighted term plus exact Robin
/// endpoint terms. Factorized once; state and adjoint solves share the
/// factorization (the form is symmetric).
class RobinOperator {
public:
  RobinOperator(const Mesh& mesh, const FieldSample& xi, const PdeData& data);

  /// Solve K u = load.
  P1State solve(const std::vector<double>& load) const;

  /// Boundary part of the right-hand side, l(phi_k).
  const std::vector<double>& boundary_load() const { return boundary_load_; }
  const TridiagMatrix& matrix() const { return matrix_; }
  const Mesh& mesh() const { return mesh_; }

private:
  const Mesh& mesh_;
  TridiagMatrix matrix_;
  TridiagFactor factor_;
  std::vector<double> boundary_load_;
};

/// Galerkin solution of the Robin problem for one field sample; control
/// and state meshes may differ.
P1State solve_state(const Mesh& state_mesh, const FieldSample& xi, const PdeData& data,
                    const Mesh& control_mesh, const P0Control& z);

/// Shared-mesh convenience overload.
P1State solve_state(const Mesh& mesh, const FieldSample& xi, const PdeData& data,
                    const P0Control& z);

/// Solve the adjoint system a(v, p) = dual_load(v); same matrix as the
/// state equation by symmetry.
P1State solve_adjoint(const Mesh& mesh, const FieldSample& xi, const PdeData& data,
                      const std::vector<double>& dual_load);

/// Least-squares slope of log(error) against log(h); needs at least
/// three levels with positive errors.
double estimate_rate(const std::vector<std::pair<double, double>>& h_error);

}  // namespace ouu::fem

#endif
