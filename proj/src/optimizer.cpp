#include "ouu/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ouu/errors.hpp"
#include "ouu/rng.hpp"

namespace ouu::opt {

void Schedule::validate() const {
  if (stages.empty()) throw std::invalid_argument("schedule has no stages");
  if (!(y_max > 0.0)) throw std::invalid_argument("y_max must be positive");
  for (size_t k = 0; k < stages.size(); ++k) {
    const StageParams& s = stages[k];
    if (s.nu < 1) throw std::invalid_argument("stage sample size must be positive");
    if (!(s.beta > 0.0)) throw std::invalid_argument("stage smoothing must be positive");
    if (!(s.theta_pen > 0.0)) throw std::invalid_argument("stage penalty must be positive");
    if (s.delta < 0.0) throw std::invalid_argument("stage tolerance must be nonnegative");
    if (s.max_inner_iters < 1) throw std::invalid_argument("stage iteration cap must be positive");
    if (k > 0) {
      const StageParams& p = stages[k - 1];
      if (s.nu < p.nu) throw std::invalid_argument("sample sizes must be nondecreasing");
      if (s.beta > p.beta) throw std::invalid_argument("smoothing must be nonincreasing");
      if (s.theta_pen < p.theta_pen)
        throw std::invalid_argument("penalties must be nondecreasing");
      if (s.delta > p.delta) throw std::invalid_argument("tolerances must be nonincreasing");
    }
  }
}

saa::ControlPoint project_box(saa::ControlPoint point) {
  for (double& v : point.z) v = std::clamp(v, point.box.lower, point.box.upper);
  point.sigma = std::max(0.0, point.sigma);
  return point;
}

namespace {

// Pack/unpack the optimization vector; (gamma, sigma) participate only
// in buffered mode.
std::vector<double> pack(const saa::ControlPoint& cp, bool buffered) {
  std::vector<double> x = cp.z;
  if (buffered) {
    x.push_back(cp.gamma);
    x.push_back(cp.sigma);
  }
  return x;
}

saa::ControlPoint unpack(const std::vector<double>& x, const saa::ControlPoint& like,
                         bool buffered) {
  saa::ControlPoint cp = like;
  const size_t n = buffered ? x.size() - 2 : x.size();
  cp.z.assign(x.begin(), x.begin() + static_cast<long>(n));
  if (buffered) {
    cp.gamma = x[n];
    cp.sigma = x[n + 1];
  }
  return cp;
}

std::vector<double> pack_gradient(const saa::Gradient& g, bool buffered) {
  std::vector<double> v = g.z;
  if (buffered) {
    v.push_back(g.gamma);
    v.push_back(g.sigma);
  }
  return v;
}

std::vector<double> project_vec(std::vector<double> x, const saa::Box& box, bool buffered) {
  const size_t n = buffered ? x.size() - 2 : x.size();
  for (size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], box.lower, box.upper);
  if (buffered) x[x.size() - 1] = std::max(0.0, x[x.size() - 1]);  // sigma
  return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

InnerResult inner_solve(const saa::SaaProblem& problem, const saa::ControlPoint& start,
                        double delta, int max_iters, std::vector<TracePoint>* trace,
                        int stage_index) {
  const bool buffered = problem.spec().mode == saa::ObjectiveMode::Buffered;
  saa::ControlPoint cur = project_box(start);
  std::vector<double> x = pack(cur, buffered);

  saa::Evaluation ev = problem.evaluate(cur, true);
  if (!ev.feasible) throw std::invalid_argument("projected start point is infeasible");
  double f = ev.value;
  double w2 = ev.w2_smooth;
  std::vector<double> g = pack_gradient(ev.gradient, buffered);

  InnerResult res;
  res.point = cur;
  res.value = f;

  double step = 1.0 / std::max(1.0, norm2(g));
  std::vector<double> prev_x, prev_g;
  bool converged = false;
  int it = 0;

  for (; it < max_iters; ++it) {
    // Projected-gradient stationarity measure at unit step.
    std::vector<double> probe = x;
    for (size_t i = 0; i < x.size(); ++i) probe[i] -= g[i];
    probe = project_vec(std::move(probe), cur.box, buffered);
    double pg = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - probe[i];
      pg += d * d;
    }
    pg = std::sqrt(pg);
    res.projected_gradient_norm = pg;
    if (trace) trace->push_back({stage_index, it, f, buffered ? w2 : 0.0, pg});
    if (pg <= delta * (1.0 + std::fabs(f))) {
      converged = true;
      break;
    }

    // Barzilai-Borwein rescaling of the trial step.
    if (!prev_x.empty()) {
      double sy = 0.0, ss = 0.0;
      for (size_t i = 0; i < x.size(); ++i) {
        const double si = x[i] - prev_x[i];
        const double yi = g[i] - prev_g[i];
        ss += si * si;
        sy += si * yi;
      }
      if (sy > 1e-300) step = std::clamp(ss / sy, 1e-12, 1e12);
    }

    // Armijo backtracking along the projection arc.
    bool accepted = false;
    double trial_step = step;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> xt = x;
      for (size_t i = 0; i < x.size(); ++i) xt[i] -= trial_step * g[i];
      xt = project_vec(std::move(xt), cur.box, buffered);
      double gd = 0.0;
      for (size_t i = 0; i < x.size(); ++i) gd += g[i] * (xt[i] - x[i]);
      const saa::ControlPoint cpt = unpack(xt, cur, buffered);
      const double ft = problem.value(cpt);
      if (ft <= f + 1e-4 * gd && std::isfinite(ft)) {
        prev_x = std::move(x);
        prev_g = std::move(g);
        x = std::move(xt);
        cur = cpt;
        saa::Evaluation evn = problem.evaluate(cur, true);
        f = evn.value;
        w2 = evn.w2_smooth;
        g = pack_gradient(evn.gradient, buffered);
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    if (!accepted) {
      res.line_search_failed = true;
      ++it;
      break;
    }
  }

  res.point = cur;
  res.value = f;
  res.iterations = it;
  res.converged = converged;
  return res;
}

double multiplier_update(double y, double theta_pen, double residual, double y_max) {
  if (!(theta_pen > 0.0)) throw std::invalid_argument("penalty must be positive");
  return std::clamp(y + 2.0 * theta_pen * residual, -y_max, y_max);
}

GapCertificate outer_loop(const OuterInputs& inputs, const Schedule& schedule,
                          std::vector<TracePoint>* trace) {
  schedule.validate();
  if (!inputs.field) throw std::invalid_argument("field spec is required");

  GapCertificate cert;
  cert.mode = inputs.mode;

  // Nested sampling: one growing sample list shared by all stages.
  std::vector<FieldSample> samples;
  samples.reserve(static_cast<size_t>(schedule.stages.back().nu));

  saa::ControlPoint iterate = project_box(inputs.start);
  double y = 0.0;
  const double alpha = inputs.qoi.alpha;

  for (size_t k = 0; k < schedule.stages.size(); ++k) {
    const StageParams& st = schedule.stages[k];
    StageRecord rec;
    rec.nu = st.nu;
    rec.beta = st.beta;
    rec.theta_pen = st.theta_pen;
    rec.y = y;
    rec.delta = st.delta;
    rec.smoothing_budget = 2.0 * st.beta / (1.0 - alpha);
    try {
      while (static_cast<int>(samples.size()) < st.nu) {
        samples.push_back(sample_field(
            inputs.field, rng::derive_seed(inputs.seed, rng::kStreamTraining, samples.size())));
      }
      saa::SaaSpec spec;
      spec.samples.assign(samples.begin(), samples.begin() + st.nu);
      spec.mesh = inputs.mesh;
      spec.control_mesh = inputs.control_mesh;
      spec.pde = inputs.pde;
      spec.qoi = inputs.qoi;
      spec.theta_reg = inputs.theta_reg;
      spec.mode = inputs.mode;
      spec.al = {y, st.theta_pen, st.beta};
      spec.threads = inputs.threads;
      saa::SaaProblem problem(std::move(spec));

      InnerResult inner =
          inner_solve(problem, iterate, st.delta, st.max_inner_iters, trace, static_cast<int>(k));
      iterate = inner.point;  // warm start for the next stage

      rec.value = inner.value;
      rec.inner_iters = inner.iterations;
      rec.converged = inner.converged;
      if (inner.line_search_failed) rec.note = "line-search stall";
      if (inputs.mode == saa::ObjectiveMode::Buffered) {
        rec.residual_smooth = problem.feasibility_residual(iterate, true);
        rec.residual_nonsmooth = problem.feasibility_residual(iterate, false);
        if (schedule.multiplier_rule == MultiplierRule::AugmentedLagrangian)
          y = multiplier_update(y, st.theta_pen, rec.residual_smooth, schedule.y_max);
      }
    } catch (const std::exception& e) {
      // Stage failure is recorded; the loop continues from the last good
      // iterate with the next stage's parameters.
      rec.failed = true;
      rec.note = e.what();
    }
    cert.stages.push_back(std::move(rec));
  }

  cert.final_point = iterate;
  cert.delta_limit = schedule.stages.back().delta;

  // Held-out re-evaluation with an independent sample stream: the
  // nonsmooth objective and residual estimates backing the certificate.
  if (inputs.nu_ref > 0) {
    const int nu_ref = inputs.nu_ref;
    std::vector<FieldSample> ref =
        sample_batch(inputs.field, inputs.seed, rng::kStreamReference, 0, nu_ref);
    saa::SaaSpec spec;
    spec.samples = std::move(ref);
    spec.mesh = inputs.mesh;
    spec.control_mesh = inputs.control_mesh;
    spec.pde = inputs.pde;
    spec.qoi = inputs.qoi;
    spec.theta_reg = inputs.theta_reg;
    spec.mode = inputs.mode;
    spec.al = {y, schedule.stages.back().theta_pen, schedule.stages.back().beta};
    spec.threads = inputs.threads;
    saa::SaaProblem problem(std::move(spec));
    const saa::Evaluation ev = problem.evaluate(iterate, false);

    cert.nu_ref = nu_ref;
    // Mean and standard error of the g1 part; the deterministic
    // regularization term shifts the mean only.
    double m = 0.0, m2 = 0.0;
    for (double v : ev.sample_g1) {
      m += v;
      m2 += v * v;
    }
    m /= nu_ref;
    m2 /= nu_ref;
    const double se_g1 =
        nu_ref > 1 ? std::sqrt(std::max(0.0, m2 - m * m) / (nu_ref - 1)) : 0.0;
    // Report the plain objective f + mean(g1), without the augmented
    // Lagrangian terms.
    double al_terms = 0.0;
    if (inputs.mode == saa::ObjectiveMode::Buffered)
      al_terms = y * ev.w2_smooth +
                 schedule.stages.back().theta_pen * ev.w2_smooth * ev.w2_smooth;
    cert.ref_value = ev.value - al_terms;
    cert.ref_value_se = se_g1;
    if (inputs.mode == saa::ObjectiveMode::Buffered) {
      cert.ref_residual = ev.w2_nonsmooth;
      double mm = 0.0, mm2 = 0.0;
      for (double v : ev.sample_g2raw) {
        const double term = std::max(0.0, v - iterate.gamma) / (1.0 - alpha);
        mm += term;
        mm2 += term * term;
      }
      mm /= nu_ref;
      mm2 /= nu_ref;
      cert.ref_residual_se =
          nu_ref > 1 ? std::sqrt(std::max(0.0, mm2 - mm * mm) / (nu_ref - 1)) : 0.0;
    }
  }
  return cert;
}

}  // namespace ouu::opt
