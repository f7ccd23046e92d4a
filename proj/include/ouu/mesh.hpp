#ifndef OUU_MESH_HPP
#define OUU_MESH_HPP

#include <functional>
#include <vector>

namespace ouu {

/// Open interval (a, b) on the real line.
struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  bool contains(double x) const { return x >= a && x <= b; }
};

/// 1D partition of an interval into elements, carrying P1 (nodal) and
/// P0 (per-element) function spaces.
class Mesh {
public:
  /// Build from an explicit strictly increasing node list.
  explicit Mesh(std::vector<double> nodes);

  /// Uniform partition with exactly h = |domain| / n_elements.
  static Mesh uniform(int n_elements, Interval domain);

  int n_elements() const { return static_cast<int>(nodes_.size()) - 1; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  double element_length(int i) const {
    return nodes_[static_cast<size_t>(i) + 1] - nodes_[static_cast<size_t>(i)];
  }
  /// Largest element length.
  double h() const { return h_; }
  Interval domain() const { return {nodes_.front(), nodes_.back()}; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Index of the element containing x (clamped to the end elements).
  int element_of(double x) const;

private:
  std::vector<double> nodes_;
  double h_ = 0.0;
};

/// Piecewise-constant control z_n: one coefficient per mesh element.
struct P0Control {
  std::vector<double> coeffs;

  static P0Control zeros(int n) { return {std::vector<double>(static_cast<size_t>(n), 0.0)}; }
  static P0Control constant(int n, double v) {
    return {std::vector<double>(static_cast<size_t>(n), v)};
  }
};

/// Continuous piecewise-linear state: one value per mesh node.
struct P1State {
  std::vector<double> values;

  static P1State zeros(int n_nodes) {
    return {std::vector<double>(static_cast<size_t>(n_nodes), 0.0)};
  }
};

/// Value of the piecewise-constant embedding of z at x.
double p0_eval(const Mesh& mesh, const P0Control& z, double x);

/// Value of the piecewise-linear interpolant at x.
double p1_eval(const Mesh& mesh, const P1State& u, double x);

/// L2 norm of the embedded control: sqrt(sum_i z_i^2 |K_i|).
/// On a uniform mesh this equals sqrt(h) * ||z||_2.
double embed_control_norm(const Mesh& mesh, const P0Control& z);

/// Exact L2 norm of a P1 function (per-element closed form).
double l2_norm(const Mesh& mesh, const P1State& u);

/// Exact H1 seminorm (L2 norm of the broken derivative).
double h1_seminorm(const Mesh& mesh, const P1State& u);

/// Norm used for stability reporting: ||u||_L2 + ||u'||_L2.
double v_norm(const Mesh& mesh, const P1State& u);

/// L2 distance between a P1 function and a callable, by 5-point Gauss
/// quadrature per element.
double l2_error(const Mesh& mesh, const P1State& u, const std::function<double(double)>& exact);

/// Mass-matrix product (M v)_k for the P1 space; exact.
std::vector<double> mass_apply(const Mesh& mesh, const std::vector<double>& v);

/// Loads (integral of phi_k over window) for each P1 basis function;
/// elements are split exactly at the window endpoints.
std::vector<double> window_load(const Mesh& mesh, Interval window);

/// Interpolate a P1 function from a coarser mesh onto target nodes.
P1State p1_interpolate(const Mesh& from, const P1State& u, const Mesh& to);

}  // namespace ouu

#endif
