#include "ouu/epi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ouu/rng.hpp"

namespace ouu::epi {

namespace {

double cell_width(const SyntheticProblem& p) { return 1.0 / p.grid_cells; }

void check_level(const SyntheticProblem& p, int n) {
  if (n < 1 || p.grid_cells % n != 0)
    throw std::invalid_argument("restriction level must divide the grid");
}

double vec_norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double oscillation_phase(std::uint64_t seed) {
  return 6.283185307179586 * rng::uniform01(rng::combine(seed, 0x414e47ULL));
}

}  // namespace

double SyntheticProblem::full_value(const std::vector<double>& grid_fn) const {
  if (static_cast<int>(grid_fn.size()) != grid_cells)
    throw std::invalid_argument("grid function size mismatch");
  const double w = cell_width(*this);
  double s = 0.0;
  for (int c = 0; c < grid_cells; ++c) {
    const double d = grid_fn[static_cast<size_t>(c)] - target[static_cast<size_t>(c)];
    s += d * d;
  }
  return s * w;
}

double SyntheticProblem::restricted_value(int n, const std::vector<double>& coeffs) const {
  check_level(*this, n);
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("coefficient size mismatch");
  const int span = grid_cells / n;
  const double w = cell_width(*this);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = coeffs[static_cast<size_t>(i)];
    for (int c = i * span; c < (i + 1) * span; ++c) {
      const double d = xi - target[static_cast<size_t>(c)];
      s += d * d;
    }
  }
  return s * w;
}

std::vector<double> SyntheticProblem::restricted_argmin(int n) const {
  check_level(*this, n);
  const int span = grid_cells / n;
  std::vector<double> m(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = i * span; c < (i + 1) * span; ++c) s += target[static_cast<size_t>(c)];
    m[static_cast<size_t>(i)] = s / span;
  }
  return m;
}

double SyntheticProblem::restricted_inf(int n) const {
  // The restricted objective is a separable quadratic; its infimum is the
  // total within-cell variance of the target.
  return restricted_value(n, restricted_argmin(n));
}

double SyntheticProblem::perturbation_bound(int nu) const { return 1.0 / nu; }

double SyntheticProblem::perturbed_value(int n, int nu, const std::vector<double>& coeffs,
                                         std::uint64_t seed) const {
  const double base = restricted_value(n, coeffs);
  switch (perturbation) {
    case Perturbation::ConstantShift:
      return base + 1.0 / nu;
    case Perturbation::Oscillatory:
      return base + std::sin(nu * vec_norm2(coeffs) + oscillation_phase(seed)) / nu;
  }
  return base;
}

std::vector<double> SyntheticProblem::perturbed_gradient(int n, int nu,
                                                         const std::vector<double>& coeffs,
                                                         std::uint64_t seed) const {
  check_level(*this, n);
  const int span = grid_cells / n;
  const double w = cell_width(*this);
  const std::vector<double> means = restricted_argmin(n);
  std::vector<double> g(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    g[static_cast<size_t>(i)] =
        2.0 * w * span * (coeffs[static_cast<size_t>(i)] - means[static_cast<size_t>(i)]);
  if (perturbation == Perturbation::Oscillatory) {
    const double r = vec_norm2(coeffs);
    if (r > 1e-14) {
      const double c = std::cos(nu * r + oscillation_phase(seed));
      for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] += c * coeffs[static_cast<size_t>(i)] / r;
    }
  }
  return g;
}

std::vector<double> SyntheticProblem::embed(int n, const std::vector<double>& coeffs) const {
  check_level(*this, n);
  const int span = grid_cells / n;
  std::vector<double> grid(static_cast<size_t>(grid_cells), 0.0);
  for (int i = 0; i < n; ++i)
    std::fill(grid.begin() + static_cast<long>(i) * span,
              grid.begin() + static_cast<long>(i + 1) * span, coeffs[static_cast<size_t>(i)]);
  return grid;
}

namespace {

// Separable closed form of the restricted objective,
//   f_n(x) = sum_i H (x_i - m_i)^2 + inf_n,
// algebraically identical to the grid sum but O(n) per evaluation.
struct RestrictedQuadratic {
  std::vector<double> means;
  double inf_n;
  double cell_weight;  // H = |cell|

  RestrictedQuadratic(const SyntheticProblem& p, int n)
      : means(p.restricted_argmin(n)), inf_n(p.restricted_inf(n)),
        cell_weight(1.0 / static_cast<double>(n)) {}

  double value(const std::vector<double>& x) const {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - means[i];
      s += d * d;
    }
    return cell_weight * s + inf_n;
  }

  double perturbed(const SyntheticProblem& p, int nu, const std::vector<double>& x,
                   std::uint64_t seed) const {
    switch (p.perturbation) {
      case SyntheticProblem::Perturbation::ConstantShift:
        return value(x) + 1.0 / nu;
      case SyntheticProblem::Perturbation::Oscillatory:
        return value(x) + std::sin(nu * vec_norm2(x) + oscillation_phase(seed)) / nu;
    }
    return value(x);
  }

  std::vector<double> perturbed_grad(const SyntheticProblem& p, int nu,
                                     const std::vector<double>& x, std::uint64_t seed) const {
    std::vector<double> g(x.size());
    for (size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * cell_weight * (x[i] - means[i]);
    if (p.perturbation == SyntheticProblem::Perturbation::Oscillatory) {
      const double r = vec_norm2(x);
      if (r > 1e-14) {
        const double c = std::cos(nu * r + oscillation_phase(seed));
        for (size_t i = 0; i < x.size(); ++i) g[i] += c * x[i] / r;
      }
    }
    return g;
  }
};

// Gradient descent with backtracking; the objectives are strongly convex
// quadratics plus an O(1/nu) ripple, so this is reliable at desk scale.
std::vector<double> minimize(const RestrictedQuadratic& q, const SyntheticProblem& p, int nu,
                             std::vector<double> x, std::uint64_t seed, int max_iters) {
  double f = q.perturbed(p, nu, x, seed);
  for (int it = 0; it < max_iters; ++it) {
    const std::vector<double> g = q.perturbed_grad(p, nu, x, seed);
    const double gn = vec_norm2(g);
    if (gn < 1e-12) break;
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      std::vector<double> xt(x.size());
      for (size_t i = 0; i < x.size(); ++i) xt[i] = x[i] - step * g[i];
      const double ft = q.perturbed(p, nu, xt, seed);
      if (ft <= f - 1e-4 * step * gn * gn) {
        x = std::move(xt);
        f = ft;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return x;
}

}  // namespace

GapDemoReport run_gap_demo(const SyntheticProblem& problem, double epsilon,
                           const std::vector<std::pair<int, double>>& delta_schedule,
                           std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (delta_schedule.empty()) throw std::invalid_argument("empty delta schedule");

  GapDemoReport rep;
  rep.problem = problem.name;
  rep.seed = seed;
  rep.epsilon = epsilon;
  rep.grid_slack = 1.0 / problem.grid_cells;
  rep.delta_limit = delta_schedule.back().second;

  // Choose the restriction level: the restricted infima are
  // nonincreasing over the nested ladder, so binary search finds the
  // smallest level meeting the epsilon budget.
  std::vector<int> levels;
  for (int n = 1; n <= problem.grid_cells / 4; n *= 2) levels.push_back(n);
  int lo = 0, hi = static_cast<int>(levels.size()) - 1;
  if (problem.restricted_inf(levels[static_cast<size_t>(hi)]) > problem.true_inf + epsilon) {
    rep.pass = false;
    rep.failure_note = "no restriction level meets the epsilon budget";
    return rep;
  }
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (problem.restricted_inf(levels[static_cast<size_t>(mid)]) <= problem.true_inf + epsilon)
      hi = mid;
    else
      lo = mid + 1;
  }
  const int n = levels[static_cast<size_t>(lo)];
  rep.n_selected = n;
  rep.restricted_inf = problem.restricted_inf(n);
  const RestrictedQuadratic quad(problem, n);

  // Seeded start within [-1, 2]^n.
  std::vector<double> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    x[static_cast<size_t>(i)] =
        -1.0 + 3.0 * rng::uniform01(rng::derive_seed(seed, 0x535441ULL, static_cast<std::uint64_t>(i)));

  const std::vector<double>& exact_argmin = quad.means;
  for (const auto& [nu, delta] : delta_schedule) {
    GapStage stage;
    stage.nu = nu;
    stage.delta = delta;

    x = minimize(quad, problem, nu, std::move(x), seed, 2000);
    double achieved = quad.perturbed(problem, nu, x, seed);
    // The unperturbed minimizer is a strong candidate under small
    // perturbations; keep whichever is better.
    const double at_exact = quad.perturbed(problem, nu, exact_argmin, seed);
    if (at_exact < achieved) {
      x = exact_argmin;
      achieved = at_exact;
    }
    stage.achieved = achieved;

    // Brute-force probe of inf f_n^nu: seeded random candidates refined
    // by descent, plus the analytic unperturbed minimizer.
    double inf_est = achieved;
    for (int probe = 0; probe < 8; ++probe) {
      std::vector<double> cand(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i)
        cand[static_cast<size_t>(i)] =
            -1.0 + 3.0 * rng::uniform01(rng::derive_seed(
                             seed, 0x50524fULL + static_cast<std::uint64_t>(probe),
                             static_cast<std::uint64_t>(i)));
      cand = minimize(quad, problem, nu, std::move(cand), seed, 400);
      inf_est = std::min(inf_est, quad.perturbed(problem, nu, cand, seed));
    }
    stage.inf_estimate = inf_est;

    // Membership is certified against the rigorous lower bound
    //   inf f_n^nu >= inf f_n - sup|f_n^nu - f_n|.
    const double rigorous_lb = quad.inf_n - problem.perturbation_bound(nu);
    stage.member_ok = achieved <= rigorous_lb + delta;
    rep.stages.push_back(stage);
  }

  rep.final_value_full = problem.full_value(problem.embed(n, x));
  rep.bound = problem.true_inf + epsilon + rep.delta_limit + rep.grid_slack;
  bool members = true;
  for (const auto& s : rep.stages) members = members && s.member_ok;
  rep.pass = members && rep.final_value_full <= rep.bound;
  if (!members) rep.failure_note = "a stage exceeded its delta budget";
  else if (!rep.pass)
    rep.failure_note = "final value exceeds the eps+delta bound";
  return rep;
}

std::vector<SyntheticProblem> bundled_problems() {
  std::vector<SyntheticProblem> out;
  const int G = 1 << 14;

  {
    // Target representable at level 8: the restriction error vanishes
    // once n >= 8 and the gap reduces to the delta budget.
    SyntheticProblem p;
    p.name = "representable-step";
    p.grid_cells = G;
    p.target.resize(static_cast<size_t>(G));
    const int span = G / 8;
    const double levels[8] = {0.2, 0.9, -0.4, 0.6, 1.1, -0.2, 0.5, 0.0};
    for (int c = 0; c < G; ++c) p.target[static_cast<size_t>(c)] = levels[std::min(c / span, 7)];
    p.true_inf = 0.0;
    p.perturbation = SyntheticProblem::Perturbation::ConstantShift;
    out.push_back(std::move(p));
  }
  {
    SyntheticProblem p;
    p.name = "smooth-sine";
    p.grid_cells = G;
    p.target.resize(static_cast<size_t>(G));
    for (int c = 0; c < G; ++c) {
      const double t = (c + 0.5) / G;
      p.target[static_cast<size_t>(c)] = 0.5 * std::sin(6.283185307179586 * t) + 0.3;
    }
    p.true_inf = 0.0;
    p.perturbation = SyntheticProblem::Perturbation::Oscillatory;
    out.push_back(std::move(p));
  }
  {
    SyntheticProblem p;
    p.name = "ramp";
    p.grid_cells = G;
    p.target.resize(static_cast<size_t>(G));
    for (int c = 0; c < G; ++c) p.target[static_cast<size_t>(c)] = (c + 0.5) / G;
    p.true_inf = 0.0;
    p.perturbation = SyntheticProblem::Perturbation::Oscillatory;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ouu::epi
