#include "ouu/saa.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ouu/errors.hpp"

namespace ouu::saa {

bool ControlPoint::feasible() const {
  if (sigma < 0.0) return false;
  for (double v : z)
    if (v < box.lower || v > box.upper) return false;
  return true;
}

void SaaSpec::validate() const {
  if (samples.empty()) throw std::invalid_argument("sample set is empty");
  if (!(qoi.alpha > 0.0 && qoi.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (theta_reg < 0.0) throw std::invalid_argument("theta_reg must be nonnegative");
  if (mode == ObjectiveMode::Buffered) {
    if (!(al.penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
    if (!(al.beta > 0.0)) throw std::invalid_argument("smoothing scale must be positive");
  }
  if (!(qoi.target_window.a < qoi.target_window.b))
    throw std::invalid_argument("target window is empty");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
}

double qoi_g1(const Mesh& mesh, const P1State& u, const QoiSpec& qoi) {
  if (static_cast<int>(u.values.size()) != mesh.n_nodes())
    throw std::invalid_argument("state size does not match mesh");
  // s_d interpolated to P1; the squared difference is then piecewise
  // quadratic and the per-element closed form is exact.
  double s = 0.0;
  double dl = u.values[0] - qoi.s_d(mesh.node(0));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double dr = u.values[static_cast<size_t>(e) + 1] - qoi.s_d(mesh.node(e + 1));
    s += mesh.element_length(e) * (dl * dl + dl * dr + dr * dr) / 3.0;
    dl = dr;
  }
  return s;
}

double qoi_g2_raw(const Mesh& mesh, const P1State& u, const QoiSpec& qoi) {
  if (static_cast<int>(u.values.size()) != mesh.n_nodes())
    throw std::invalid_argument("state size does not match mesh");
  double integral = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double xl = mesh.node(e), xr = mesh.node(e + 1);
    const double p = std::max(xl, qoi.target_window.a), q = std::min(xr, qoi.target_window.b);
    if (q <= p) continue;
    const double up = p1_eval(mesh, u, p), uq = p1_eval(mesh, u, q);
    integral += 0.5 * (q - p) * (up + uq);
  }
  return qoi.s_t - integral;
}

double g2_buffered_smooth(double g2raw, double gamma, double sigma, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  return sigma + gamma + risk::smax(g2raw - gamma, beta) / (1.0 - alpha);
}

double Gradient::norm2() const {
  double s = gamma * gamma + sigma * sigma;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

SaaProblem::SaaProblem(SaaSpec spec)
    : spec_(std::move(spec)),
      coupling_(spec_.mesh, spec_.control_mesh, spec_.pde.c1),
      neg_window_load_(window_load(spec_.mesh, spec_.qoi.target_window)) {
  spec_.validate();
  for (double& v : neg_window_load_) v = -v;
  control_lengths_.resize(static_cast<size_t>(spec_.control_mesh.n_elements()));
  for (int i = 0; i < spec_.control_mesh.n_elements(); ++i)
    control_lengths_[static_cast<size_t>(i)] = spec_.control_mesh.element_length(i);
}

int SaaProblem::dim() const {
  const int n = spec_.control_mesh.n_elements();
  return spec_.mode == ObjectiveMode::Buffered ? n + 2 : n;
}

namespace {

struct SampleResult {
  double g1 = 0.0;
  double g2raw = 0.0;
  std::vector<double> grad_g1_z;  // adjoint pairing for g1
  std::vector<double> grad_g2_z;  // adjoint pairing for g2 (buffered)
};

void run_indexed(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  const int t = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += t) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Evaluation SaaProblem::evaluate(const ControlPoint& cp, bool with_gradient) const {
  const int n_ctrl = spec_.control_mesh.n_elements();
  if (static_cast<int>(cp.z.size()) != n_ctrl)
    throw std::invalid_argument("control size does not match problem");

  Evaluation ev;
  ev.feasible = cp.feasible();
  if (!ev.feasible) return ev;  // indicator semantics: value stays +inf

  const bool buffered = spec_.mode == ObjectiveMode::Buffered;
  const int nu = static_cast<int>(spec_.samples.size());
  const P0Control z{cp.z};

  // Regularization part and its gradient.
  double reg = 0.0;
  for (int i = 0; i < n_ctrl; ++i)
    reg += cp.z[static_cast<size_t>(i)] * cp.z[static_cast<size_t>(i)] *
           control_lengths_[static_cast<size_t>(i)];
  reg *= spec_.theta_reg;

  const std::vector<double> base_load = coupling_.apply(z);

  std::vector<SampleResult> results(static_cast<size_t>(nu));
  std::exception_ptr first_error;
  std::mutex error_mutex;

  run_indexed(nu, spec_.threads, [&](int j) {
    try {
      const FieldSample& xi = spec_.samples[static_cast<size_t>(j)];
      fem::RobinOperator op(spec_.mesh, xi, spec_.pde);
      std::vector<double> rhs = op.boundary_load();
      for (size_t k = 0; k < rhs.size(); ++k) rhs[k] += base_load[k];
      const P1State u = op.solve(rhs);

      SampleResult& r = results[static_cast<size_t>(j)];
      r.g1 = qoi_g1(spec_.mesh, u, spec_.qoi);
      if (buffered) r.g2raw = qoi_g2_raw(spec_.mesh, u, spec_.qoi);

      if (with_gradient) {
        // dg1/du pairing: 2 * M * (u - I_h s_d); one adjoint per sample
        // reusing the state factorization.
        std::vector<double> diff(u.values.size());
        for (int k = 0; k < spec_.mesh.n_nodes(); ++k)
          diff[static_cast<size_t>(k)] =
              u.values[static_cast<size_t>(k)] - spec_.qoi.s_d(spec_.mesh.node(k));
        std::vector<double> dual = mass_apply(spec_.mesh, diff);
        for (double& v : dual) v *= 2.0;
        const P1State p1 = op.solve(dual);
        r.grad_g1_z = coupling_.apply_transpose(p1);
        if (buffered) {
          const P1State p2 = op.solve(neg_window_load_);
          r.grad_g2_z = coupling_.apply_transpose(p2);
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error)
        first_error = std::make_exception_ptr(
            NumericalError("sample " + std::to_string(j) + ": " + e.what()));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  // Fixed-order serial reduction: results are independent of the thread
  // count and identical run to run.
  ev.sample_g1.resize(static_cast<size_t>(nu));
  double w1 = 0.0;
  for (int j = 0; j < nu; ++j) {
    ev.sample_g1[static_cast<size_t>(j)] = results[static_cast<size_t>(j)].g1;
    w1 += results[static_cast<size_t>(j)].g1;
  }
  w1 /= nu;
  ev.w1 = w1;

  double value = reg + w1;
  Gradient grad;
  if (with_gradient) {
    grad.z.assign(static_cast<size_t>(n_ctrl), 0.0);
    for (int i = 0; i < n_ctrl; ++i)
      grad.z[static_cast<size_t>(i)] = 2.0 * spec_.theta_reg * cp.z[static_cast<size_t>(i)] *
                                       control_lengths_[static_cast<size_t>(i)];
    for (int j = 0; j < nu; ++j)
      for (int i = 0; i < n_ctrl; ++i)
        grad.z[static_cast<size_t>(i)] +=
            results[static_cast<size_t>(j)].grad_g1_z[static_cast<size_t>(i)] / nu;
  }

  if (buffered) {
    const double alpha = spec_.qoi.alpha;
    const double beta = spec_.al.beta;
    ev.sample_g2raw.resize(static_cast<size_t>(nu));
    double mean_smax = 0.0, mean_max = 0.0, mean_sgrad = 0.0;
    for (int j = 0; j < nu; ++j) {
      const double g2 = results[static_cast<size_t>(j)].g2raw;
      ev.sample_g2raw[static_cast<size_t>(j)] = g2;
      mean_smax += risk::smax(g2 - cp.gamma, beta);
      mean_max += std::max(0.0, g2 - cp.gamma);
      if (with_gradient) mean_sgrad += risk::smax_grad(g2 - cp.gamma, beta);
    }
    mean_smax /= nu;
    mean_max /= nu;
    mean_sgrad /= nu;

    const double w2s = cp.sigma + cp.gamma + mean_smax / (1.0 - alpha);
    ev.w2_smooth = w2s;
    ev.w2_nonsmooth = cp.sigma + cp.gamma + mean_max / (1.0 - alpha);
    value += spec_.al.multiplier * w2s + spec_.al.penalty * w2s * w2s;

    if (with_gradient) {
      const double chain = spec_.al.multiplier + 2.0 * spec_.al.penalty * w2s;
      for (int j = 0; j < nu; ++j) {
        const double sj =
            risk::smax_grad(results[static_cast<size_t>(j)].g2raw - cp.gamma, beta);
        for (int i = 0; i < n_ctrl; ++i)
          grad.z[static_cast<size_t>(i)] +=
              chain * sj * results[static_cast<size_t>(j)].grad_g2_z[static_cast<size_t>(i)] /
              ((1.0 - alpha) * nu);
      }
      grad.gamma = chain * (1.0 - mean_sgrad / (1.0 - alpha));
      grad.sigma = chain;
    }
  }

  ev.value = value;
  if (with_gradient) {
    ev.gradient = std::move(grad);
    ev.has_gradient = true;
  }
  return ev;
}

double SaaProblem::value(const ControlPoint& cp) const { return evaluate(cp, false).value; }

Gradient SaaProblem::gradient(const ControlPoint& cp) const {
  Evaluation ev = evaluate(cp, true);
  if (!ev.feasible) throw std::invalid_argument("gradient requested at an infeasible point");
  return std::move(ev.gradient);
}

double SaaProblem::feasibility_residual(const ControlPoint& cp, bool smooth) const {
  if (spec_.mode != ObjectiveMode::Buffered)
    throw std::invalid_argument("feasibility residual is defined in buffered mode");
  const Evaluation ev = evaluate(cp, false);
  if (!ev.feasible) throw std::invalid_argument("residual requested at an infeasible point");
  return smooth ? ev.w2_smooth : ev.w2_nonsmooth;
}

double saa_value(const ControlPoint& cp, const SaaSpec& spec) {
  return SaaProblem(spec).value(cp);
}

Gradient saa_gradient(const ControlPoint& cp, const SaaSpec& spec) {
  return SaaProblem(spec).gradient(cp);
}

double feasibility_residual(const ControlPoint& cp, const SaaSpec& spec, bool smooth) {
  return SaaProblem(spec).feasibility_residual(cp, smooth);
}

}  // namespace ouu::saa
