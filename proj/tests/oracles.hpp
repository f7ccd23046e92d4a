// Test-side oracles: independent straight-line implementations used to
// freeze expected values. They deliberately share no numerics with the
// library (dense assembly, split-atom tail averages, grid searches);
// only input types are reused.
#ifndef OUU_TESTS_ORACLES_HPP
#define OUU_TESTS_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "ouu/risk.hpp"
#include "ouu/saa.hpp"

namespace oracles {

// Superquantile as the explicit tail average, splitting the atom at the
// alpha level.
double sorted_tail_average(const std::vector<double>& values, const std::vector<double>& weights,
                           double alpha);

// Superquantile via direct scan of the minimization objective
// gamma + E[max(0, X - gamma)]/(1-alpha) over the support (its minimum
// is attained at an atom).
double ru_minimization_scan(const std::vector<double>& values, const std::vector<double>& weights,
                            double alpha);

// min over gamma of gamma + penalty_regret(X - gamma, alpha) by golden
// grid refinement; used against the library's superquantile.
double regret_minimization_grid(const std::vector<double>& values,
                                const std::vector<double>& weights, double alpha);

// Dense-matrix Galerkin solve of the Robin problem with the same
// discretization rules (2-point Gauss stiffness, exact P0 loads,
// endpoint Robin terms) but flat Gaussian elimination. Requires the
// control mesh elements to be unions of state elements (nested uniform
// meshes) and c1 constant.
std::vector<double> dense_robin_solve(int n_state, double domain_a, double domain_b,
                                      const std::function<double(double)>& xi, double c1,
                                      double c2a, double c2b, double sea, double seb,
                                      const std::vector<double>& z_on_control);

// Straight-line re-implementation of the sample-average objective on
// uniform nested meshes with constant c1.
double naive_saa_value(const ouu::saa::ControlPoint& cp, const ouu::saa::SaaSpec& spec);

// Central finite differences of a scalar function of a packed vector.
std::vector<double> central_differences(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double relative_step = 1e-5);

// Deterministic random discrete law for property sweeps.
ouu::risk::DiscreteRv random_law(std::uint64_t key, int max_size = 200);

}  // namespace oracles

#endif
