#include "ouu/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "ouu/csv.hpp"
#include "ouu/epi.hpp"
#include "ouu/errors.hpp"
#include "ouu/fem.hpp"
#include "ouu/optimizer.hpp"
#include "ouu/risk.hpp"
#include "ouu/rng.hpp"

namespace ouu::run {

namespace {

using io::format_double;

constexpr std::uint64_t kStreamDecay = 0x44454341u;
constexpr std::uint64_t kStreamLaws = 0x4c415753u;

/// Run a command body, mapping exceptions onto the exit-code convention.
template <typename Fn>
CommandResult guarded(Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return {2, std::string("config error: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    return {2, std::string("invalid argument: ") + e.what()};
  } catch (const NumericalError& e) {
    return {3, std::string("numerical failure: ") + e.what()};
  } catch (const std::exception& e) {
    return {3, std::string("failure: ") + e.what()};
  }
}

// ---------------------------------------------------------------------
// Manufactured Robin instance: u*(x) = sin(pi x) on (0,1) with unit
// conductivity; the P0 source is the midpoint sampling of pi^2 sin(pi x)
// and the Robin data matches the exact boundary flux.
struct Manufactured {
  fem::PdeData pde;
  std::shared_ptr<const FieldSpec> field;

  Manufactured() {
    pde.c1 = ScalarField::constant(1.0);
    pde.c2 = {1.0, 1.0};
    const double pi = 3.14159265358979323846;
    pde.s_e = {-pi, -pi};
    auto spec = std::make_shared<FieldSpec>();
    spec->domain = {0.0, 1.0};
    field = std::move(spec);
  }

  static double exact(double x) { return std::sin(3.14159265358979323846 * x); }

  double solve_error(int n) const {
    const double pi = 3.14159265358979323846;
    const Mesh mesh = Mesh::uniform(n, {0.0, 1.0});
    P0Control z = P0Control::zeros(n);
    for (int i = 0; i < n; ++i) {
      const double mid = 0.5 * (mesh.node(i) + mesh.node(i + 1));
      z.coeffs[static_cast<size_t>(i)] = pi * pi * std::sin(pi * mid);
    }
    const FieldSample xi = sample_field(field, 0);
    const P1State u = fem::solve_state(mesh, xi, pde, z);
    return l2_error(mesh, u, exact);
  }
};

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // ">=" or "<="
  bool pass = false;
  std::string detail;
};

bool relation_holds(const Check& c) {
  return c.relation == ">=" ? c.measured >= c.bound : c.measured <= c.bound;
}

risk::DiscreteRv random_law(std::uint64_t key) {
  const int n = 1 + static_cast<int>(rng::uniform01(rng::combine(key, 1)) * 200.0);
  risk::DiscreteRv rv;
  rv.values.resize(static_cast<size_t>(n));
  rv.weights.resize(static_cast<size_t>(n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    rv.values[static_cast<size_t>(i)] =
        -5.0 + 10.0 * rng::uniform01(rng::derive_seed(key, 2, static_cast<std::uint64_t>(i)));
    const double w =
        1e-3 + rng::uniform01(rng::derive_seed(key, 3, static_cast<std::uint64_t>(i)));
    rv.weights[static_cast<size_t>(i)] = w;
    sum += w;
  }
  for (double& w : rv.weights) w /= sum;
  // Renormalize residual rounding into the last weight.
  double total = 0.0;
  for (double w : rv.weights) total += w;
  rv.weights.back() += 1.0 - total;
  return rv;
}

/// Split-atom tail average: second route to the superquantile used by
/// the verification battery.
double tail_average(const risk::DiscreteRv& rv, double alpha) {
  std::vector<size_t> idx(rv.values.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return rv.values[a] < rv.values[b]; });
  double cum = 0.0;
  double acc = 0.0;
  bool split_done = false;
  for (size_t r = 0; r < idx.size(); ++r) {
    const double v = rv.values[idx[r]];
    const double w = rv.weights[idx[r]];
    if (split_done) {
      acc += w * v;
      continue;
    }
    if (cum + w >= alpha) {
      acc += (cum + w - alpha) * v;
      split_done = true;
    }
    cum += w;
  }
  return acc / (1.0 - alpha);
}

std::string checks_to_csv(const std::vector<Check>& checks, std::uint64_t hash,
                          std::uint64_t seed) {
  std::string out = io::artifact_header(hash, seed);
  out += "check,measured,relation,bound,pass,detail\n";
  for (const Check& c : checks) {
    out += c.name + "," + format_double(c.measured) + "," + c.relation + "," +
           format_double(c.bound) + "," + (c.pass ? "1" : "0") + "," + c.detail + "\n";
  }
  return out;
}

std::string checks_to_text(const std::vector<Check>& checks) {
  std::ostringstream os;
  for (const Check& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": measured " << c.measured << " "
       << c.relation << " " << c.bound;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace

// -----------------------------------------------------------------------
CommandResult solve_pde(const cfg::ExperimentConfig& config, const std::string& out_dir,
                        std::optional<std::uint64_t> sample_seed) {
  return guarded([&]() -> CommandResult {
    const cfg::InstanceConfig& inst = config.require_instance();
    const std::uint64_t seed = sample_seed.value_or(config.seed);
    const Mesh mesh = inst.state_mesh();
    const Mesh cmesh = inst.control_mesh();
    const FieldSample xi = sample_field(inst.field, seed);
    const P1State u = fem::solve_state(mesh, xi, inst.pde, cmesh, P0Control{inst.z0});

    io::ensure_directory(out_dir);
    std::string csv = io::artifact_header(config.config_hash, seed);
    csv += "x,u\n";
    for (int i = 0; i < mesh.n_nodes(); ++i)
      csv += format_double(mesh.node(i)) + "," + format_double(u.values[static_cast<size_t>(i)]) +
             "\n";
    io::write_text_file(out_dir + "/state.csv", csv);
    return {0, "state written to " + out_dir + "/state.csv (" +
                   std::to_string(mesh.n_nodes()) + " nodes)"};
  });
}

CommandResult sample_field_cmd(const cfg::ExperimentConfig& config, const std::string& out_dir) {
  return guarded([&]() -> CommandResult {
    const cfg::InstanceConfig& inst = config.require_instance();
    const int count = config.sample_field.count;
    const int pts = config.sample_field.grid_points;
    const std::vector<FieldSample> samples =
        sample_batch(inst.field, config.seed, rng::kStreamTraining, 0, count);

    io::ensure_directory(out_dir);
    std::string csv = io::artifact_header(config.config_hash, config.seed);
    csv += "x";
    for (int s = 0; s < count; ++s) csv += ",xi_" + std::to_string(s);
    csv += "\n";
    for (int i = 0; i < pts; ++i) {
      const double x = inst.domain.a + inst.domain.length() * i / (pts - 1);
      csv += format_double(x);
      for (int s = 0; s < count; ++s)
        csv += "," + format_double(samples[static_cast<size_t>(s)](x));
      csv += "\n";
    }
    io::write_text_file(out_dir + "/field_samples.csv", csv);

    std::ostringstream msg;
    msg << count << " field sample(s) written to " << out_dir << "/field_samples.csv; bounds:";
    for (const FieldSample& s : samples)
      msg << " [" << s.lower_bound() << ", " << s.upper_bound() << "]";
    return {0, msg.str()};
  });
}

CommandResult risk_eval(const std::string& values_csv, double alpha, const std::string& out_dir) {
  return guarded([&]() -> CommandResult {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("alpha must lie in (0, 1)");
    const io::ValueTable table = io::read_value_csv(values_csv);
    risk::DiscreteRv rv;
    if (table.weights.empty()) {
      rv = risk::DiscreteRv::uniform(table.values);
    } else {
      rv.values = table.values;
      rv.weights = table.weights;
      double sum = 0.0;
      for (double w : rv.weights) {
        if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
        sum += w;
      }
      for (double& w : rv.weights) w /= sum;
      double total = 0.0;
      for (double w : rv.weights) total += w;
      rv.weights.back() += 1.0 - total;
    }

    const double mean = rv.mean();
    const double q = risk::quantile(rv, alpha);
    const double sq = risk::superquantile(rv, alpha);
    const double bp = risk::buffered_probability(rv);
    const double pr = risk::penalty_regret(rv, alpha);

    std::ostringstream msg;
    msg << "n=" << rv.values.size() << " alpha=" << alpha << "\n";
    msg << "mean                 " << mean << "\n";
    msg << "quantile             " << q << "\n";
    msg << "superquantile        " << sq << "\n";
    msg << "buffered_probability " << bp << "\n";
    msg << "penalty_regret       " << pr;

    if (!out_dir.empty()) {
      io::ensure_directory(out_dir);
      std::string csv = "# source=" + values_csv + " alpha=" + format_double(alpha) + "\n";
      csv += "metric,value\n";
      csv += "mean," + format_double(mean) + "\n";
      csv += "quantile," + format_double(q) + "\n";
      csv += "superquantile," + format_double(sq) + "\n";
      csv += "buffered_probability," + format_double(bp) + "\n";
      csv += "penalty_regret," + format_double(pr) + "\n";
      io::write_text_file(out_dir + "/risk_metrics.csv", csv);
    }
    return {0, msg.str()};
  });
}

// -----------------------------------------------------------------------
CommandResult optimize(const cfg::ExperimentConfig& config, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override, std::optional<int> threads) {
  return guarded([&]() -> CommandResult {
    const cfg::InstanceConfig& inst = config.require_instance();
    const opt::Schedule& schedule = config.require_schedule();
    const std::uint64_t seed = seed_override.value_or(config.seed);

    opt::OuterInputs in;
    in.mesh = inst.state_mesh();
    in.control_mesh = inst.control_mesh();
    in.pde = inst.pde;
    in.qoi = inst.qoi;
    in.theta_reg = inst.theta_reg;
    in.mode = inst.mode;
    in.field = inst.field;
    in.seed = seed;
    in.threads = threads.value_or(config.threads);
    in.start = inst.start();
    in.nu_ref = config.nu_ref;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<opt::TracePoint> trace;
    const opt::GapCertificate cert = opt::outer_loop(in, schedule, &trace);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool buffered = inst.mode == saa::ObjectiveMode::Buffered;
    int n_failed = 0;
    for (const auto& s : cert.stages) n_failed += s.failed ? 1 : 0;
    const bool feasible_ok =
        !buffered || std::fabs(cert.ref_residual) <= config.feasibility_tolerance;

    io::ensure_directory(out_dir);

    {  // trace.csv
      std::string csv = io::artifact_header(config.config_hash, seed);
      csv += "stage,iteration,value,residual,gradient_norm\n";
      for (const auto& t : trace)
        csv += std::to_string(t.stage) + "," + std::to_string(t.iteration) + "," +
               format_double(t.value) + "," + format_double(t.residual) + "," +
               format_double(t.gradient_norm) + "\n";
      io::write_text_file(out_dir + "/trace.csv", csv);
    }
    {  // certificate.csv
      std::string csv = io::artifact_header(config.config_hash, seed);
      csv +=
          "stage,nu,beta,theta_pen,y,value,residual_smooth,residual_nonsmooth,"
          "smoothing_budget,delta,inner_iters,converged,failed\n";
      for (size_t k = 0; k < cert.stages.size(); ++k) {
        const auto& s = cert.stages[k];
        csv += std::to_string(k) + "," + std::to_string(s.nu) + "," + format_double(s.beta) +
               "," + format_double(s.theta_pen) + "," + format_double(s.y) + "," +
               format_double(s.value) + "," + format_double(s.residual_smooth) + "," +
               format_double(s.residual_nonsmooth) + "," + format_double(s.smoothing_budget) +
               "," + format_double(s.delta) + "," + std::to_string(s.inner_iters) + "," +
               (s.converged ? "1" : "0") + "," + (s.failed ? "1" : "0") + "\n";
      }
      io::write_text_file(out_dir + "/certificate.csv", csv);
    }
    {  // final_control.csv
      std::string csv = io::artifact_header(config.config_hash, seed);
      csv += "element,x_mid,z\n";
      const Mesh cm = inst.control_mesh();
      for (int i = 0; i < cm.n_elements(); ++i)
        csv += std::to_string(i) + "," + format_double(0.5 * (cm.node(i) + cm.node(i + 1))) +
               "," + format_double(cert.final_point.z[static_cast<size_t>(i)]) + "\n";
      io::write_text_file(out_dir + "/final_control.csv", csv);
    }
    {  // certificate.txt: structured, deterministic (no timing entries)
      std::ostringstream os;
      os << io::artifact_header(config.config_hash, seed);
      os << "mode: " << (buffered ? "buffered" : "expectation") << "\n";
      os << "control_dim: " << inst.control_elements << "\n";
      os << "delta_limit: " << format_double(cert.delta_limit)
         << "  (inner stationarity surrogate: projected-gradient norm <= delta*(1+|value|); "
            "the near-argmin tolerance itself is not observable)\n";
      os << "stages:\n";
      os << "  stage      nu        beta   theta_pen           y               value      "
            "res_smooth   res_nonsmooth   smooth_budget  iters  conv  fail\n";
      for (size_t k = 0; k < cert.stages.size(); ++k) {
        const auto& s = cert.stages[k];
        char line[320];
        std::snprintf(line, sizeof(line),
                      "  %5zu  %6d  %10.4g  %10.4g  %10.4g  %18.12g  %14.6g  %14.6g  %14.6g  "
                      "%5d  %4d  %4d",
                      k, s.nu, s.beta, s.theta_pen, s.y, s.value, s.residual_smooth,
                      s.residual_nonsmooth, s.smoothing_budget, s.inner_iters,
                      s.converged ? 1 : 0, s.failed ? 1 : 0);
        os << line;
        if (!s.note.empty()) os << "  note: " << s.note;
        os << "\n";
      }
      os << "final_point:\n";
      os << "  gamma: " << format_double(cert.final_point.gamma) << "\n";
      os << "  sigma: " << format_double(cert.final_point.sigma) << "\n";
      os << "  z:";
      for (double v : cert.final_point.z) os << " " << format_double(v);
      os << "\n";
      os << "reference (independent sample, nu_ref=" << cert.nu_ref << "):\n";
      os << "  objective_estimate: " << format_double(cert.ref_value)
         << "  se: " << format_double(cert.ref_value_se) << "\n";
      if (buffered) {
        os << "  residual_nonsmooth: " << format_double(cert.ref_residual)
           << "  se: " << format_double(cert.ref_residual_se) << "\n";
        os << "  feasibility_tolerance: " << format_double(config.feasibility_tolerance) << "\n";
      }
      os << "verdict: " << (feasible_ok ? "PASS" : "FAIL") << "\n";
      io::write_text_file(out_dir + "/certificate.txt", os.str());
    }

    std::ostringstream msg;
    msg << "stages: " << cert.stages.size() << " (" << n_failed << " failed), final value "
        << cert.stages.back().value << ", reference objective " << cert.ref_value << " +/- "
        << cert.ref_value_se;
    if (buffered)
      msg << ", reference residual " << cert.ref_residual << " (tolerance "
          << config.feasibility_tolerance << ")";
    msg << ", wall time " << elapsed << "s; artifacts in " << out_dir;

    if (n_failed == static_cast<int>(cert.stages.size()))
      return {3, "all stages failed; " + msg.str()};
    if (!feasible_ok) return {1, "feasibility check FAILED; " + msg.str()};
    return {0, msg.str()};
  });
}

// -----------------------------------------------------------------------
CommandResult verify(const cfg::ExperimentConfig& config, const std::string& out_dir) {
  return guarded([&]() -> CommandResult {
    const cfg::InstanceConfig& inst = config.require_instance();
    const cfg::VerifyParams& vp = config.verify;
    std::vector<Check> checks;

    {  // FEM manufactured-solution convergence order
      Manufactured man;
      std::vector<std::pair<double, double>> pts;
      std::vector<int> dofs;
      for (int n : vp.rate_levels) {
        pts.emplace_back(1.0 / n, man.solve_error(n));
        dofs.push_back(n + 1);
      }
      Check c;
      c.name = "fem_manufactured_rate";
      c.measured = fem::estimate_rate(pts);
      c.bound = vp.rate_min;
      c.relation = ">=";
      c.pass = relation_holds(c);
      std::ostringstream d;
      d << "levels";
      for (const auto& [h, e] : pts) d << " h=" << h << ":err=" << e;
      c.detail = d.str();
      checks.push_back(c);

      io::ensure_directory(out_dir);
      std::string table = io::artifact_header(config.config_hash, config.seed);
      table += "h,dof,l2_error,rate\n";
      for (size_t i = 0; i < pts.size(); ++i) {
        const double rate =
            i == 0 ? std::numeric_limits<double>::quiet_NaN()
                   : std::log(pts[i - 1].second / pts[i].second) /
                         std::log(pts[i - 1].first / pts[i].first);
        table += format_double(pts[i].first) + "," + std::to_string(dofs[i]) + "," +
                 format_double(pts[i].second) + "," + format_double(rate) + "\n";
      }
      io::write_text_file(out_dir + "/convergence_table.csv", table);
    }

    {  // Random-coefficient refinement decay per sample
      double worst = 1e300;
      const Mesh cmesh = inst.control_mesh();
      const P0Control z{inst.z0};
      for (int s = 0; s < vp.decay_samples; ++s) {
        const FieldSample xi =
            sample_field(inst.field, rng::derive_seed(config.seed, kStreamDecay,
                                                      static_cast<std::uint64_t>(s)));
        std::vector<std::pair<double, double>> pts;
        for (size_t l = 0; l + 1 < vp.decay_levels.size(); ++l) {
          const Mesh coarse = Mesh::uniform(vp.decay_levels[l], inst.domain);
          const Mesh fine = Mesh::uniform(vp.decay_levels[l + 1], inst.domain);
          const P1State uc = fem::solve_state(coarse, xi, inst.pde, cmesh, z);
          const P1State uf = fem::solve_state(fine, xi, inst.pde, cmesh, z);
          P1State diff = p1_interpolate(coarse, uc, fine);
          for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= uf.values[i];
          pts.emplace_back(coarse.h(), l2_norm(fine, diff));
        }
        worst = std::min(worst, fem::estimate_rate(pts));
      }
      Check c;
      c.name = "field_refinement_decay";
      c.measured = worst;
      c.bound = vp.decay_min_order;
      c.relation = ">=";
      c.pass = relation_holds(c);
      c.detail = "min order over " + std::to_string(vp.decay_samples) + " samples";
      checks.push_back(c);
    }

    {  // smax deviation bound over the gamma grid
      const double betas[3] = {1.0, 0.1, 0.01};
      double worst_ratio = 0.0;
      double min_dev = 0.0;
      for (double beta : betas) {
        for (int i = 0; i <= 20000; ++i) {
          const double g = -100.0 + i * 1e-2;
          const double dev = risk::smax(g, beta) - std::max(0.0, g);
          worst_ratio = std::max(worst_ratio, dev / beta);
          min_dev = std::min(min_dev, dev);
        }
      }
      Check c;
      c.name = "smax_bound";
      c.measured = worst_ratio;
      c.bound = vp.smax_bound_factor;
      c.relation = "<=";
      c.pass = relation_holds(c) && min_dev >= 0.0;
      c.detail = "sup (smax-max)/beta over grid; min deviation " + format_double(min_dev);
      checks.push_back(c);
    }

    {  // superquantile: minimization form vs split-atom tail average
      double worst = 0.0;
      for (int k = 0; k < vp.superquantile_laws; ++k) {
        const std::uint64_t key = rng::derive_seed(config.seed, kStreamLaws, 2 * k);
        const risk::DiscreteRv rv = random_law(key);
        const double alpha = 0.98 * rng::uniform01(rng::combine(key, 77));
        worst = std::max(worst,
                         std::fabs(risk::superquantile(rv, alpha) - tail_average(rv, alpha)));
      }
      Check c;
      c.name = "superquantile_two_routes";
      c.measured = worst;
      c.bound = vp.superquantile_tol;
      c.relation = "<=";
      c.pass = relation_holds(c);
      c.detail = std::to_string(vp.superquantile_laws) + " random laws";
      checks.push_back(c);
    }

    {  // buffered probability <-> superquantile sign duality
      int violations = 0;
      for (int k = 0; k < vp.duality_laws; ++k) {
        const risk::DiscreteRv rv =
            random_law(rng::derive_seed(config.seed, kStreamLaws, 10001 + 2 * k));
        const double bp = risk::buffered_probability(rv);
        for (int a = 0; a < vp.duality_alpha_points; ++a) {
          const double alpha =
              0.02 + 0.96 * a / std::max(1, vp.duality_alpha_points - 1);
          const double sq = risk::superquantile(rv, alpha);
          // Exclude the razor edge |sq| < 1e-9 where the root itself sits.
          if (sq <= -1e-9 && !(bp <= 1.0 - alpha + 1e-9)) ++violations;
          if (sq >= 1e-9 && !(bp >= 1.0 - alpha - 1e-9)) ++violations;
        }
      }
      const double c1v = risk::buffered_probability(risk::DiscreteRv::uniform({-1.0, -2.0}));
      const double c2v = risk::buffered_probability(risk::DiscreteRv::uniform({-1.0, 1.0}));
      const double c3v = risk::buffered_probability(risk::DiscreteRv::uniform({-3.0, 1.0}));
      const bool closed = std::fabs(c1v - 0.0) <= 1e-9 && std::fabs(c2v - 1.0) <= 1e-9 &&
                          std::fabs(c3v - 2.0 / 3.0) <= 1e-9;
      Check c;
      c.name = "bprob_superquantile_duality";
      c.measured = violations;
      c.bound = 0.0;
      c.relation = "<=";
      c.pass = relation_holds(c) && closed;
      c.detail = "closed cases " + format_double(c1v) + "," + format_double(c2v) + "," +
                 format_double(c3v);
      checks.push_back(c);
    }

    {  // Integrability probe at the (p, q) corners
      const double corners[4][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 3.0}, {1.0, 3.0}};
      bool all_finite = true;
      double worst_dev = 0.0;
      // Constant-mode spec: exact lognormal moments e^{(p-q)^2/2}.
      auto cspec = std::make_shared<FieldSpec>();
      cspec->domain = inst.domain;
      cspec->modes.push_back(ScalarField::constant(1.0));
      for (const auto& pq : corners) {
        const ProbeEstimate inst_probe =
            integrability_probe(inst.field, pq[0], pq[1], vp.probe_n_mc, config.seed);
        all_finite = all_finite && std::isfinite(inst_probe.mean);
        const ProbeEstimate cm =
            integrability_probe(cspec, pq[0], pq[1], vp.probe_n_mc, config.seed);
        const double exact = std::exp(0.5 * (pq[0] - pq[1]) * (pq[0] - pq[1]));
        const double band = vp.probe_se_factor * cm.standard_error;
        const double dev = std::fabs(cm.mean - exact);
        worst_dev = std::max(worst_dev, band > 0.0 ? dev / band : dev);
      }
      Check c;
      c.name = "integrability_probe_corners";
      c.measured = worst_dev;
      c.bound = 1.0;
      c.relation = "<=";
      c.pass = relation_holds(c) && all_finite;
      c.detail = "constant-mode deviation / (" + format_double(vp.probe_se_factor) +
                 " se); instance corners finite=" + (all_finite ? std::string("1") : "0");
      checks.push_back(c);
    }

    io::ensure_directory(out_dir);
    io::write_text_file(out_dir + "/verify_report.csv",
                        checks_to_csv(checks, config.config_hash, config.seed));
    const std::string text = checks_to_text(checks);
    io::write_text_file(out_dir + "/verify_report.txt",
                        io::artifact_header(config.config_hash, config.seed) + text);

    bool all_pass = true;
    for (const Check& c : checks) all_pass = all_pass && c.pass;
    if (!all_pass) return {1, "verification FAILED\n" + text};
    return {0, "all verification checks passed\n" + text};
  });
}

// -----------------------------------------------------------------------
CommandResult epi_demo(const cfg::ExperimentConfig& config, const std::string& out_dir) {
  return guarded([&]() -> CommandResult {
    const cfg::EpiDemoParams& ep = config.epi;
    const std::vector<epi::SyntheticProblem> problems = epi::bundled_problems();

    std::string csv = io::artifact_header(config.config_hash, config.seed);
    csv += "problem,seed,n,nu,delta,inf_estimate,achieved,bound,member_ok,final_value,pass\n";
    std::ostringstream text;
    bool all_pass = true;

    for (const auto& p : problems) {
      for (std::uint64_t seed : ep.seeds) {
        const epi::GapDemoReport rep = epi::run_gap_demo(p, ep.epsilon, ep.stages, seed);
        all_pass = all_pass && rep.pass;
        for (const auto& st : rep.stages) {
          csv += rep.problem + "," + std::to_string(seed) + "," + std::to_string(rep.n_selected) +
                 "," + std::to_string(st.nu) + "," + format_double(st.delta) + "," +
                 format_double(st.inf_estimate) + "," + format_double(st.achieved) + "," +
                 format_double(rep.bound) + "," + (st.member_ok ? "1" : "0") + "," +
                 format_double(rep.final_value_full) + "," + (rep.pass ? "1" : "0") + "\n";
        }
        text << (rep.pass ? "[PASS] " : "[FAIL] ") << rep.problem << " seed=" << seed
             << " n=" << rep.n_selected << " f(T_n(x))=" << rep.final_value_full
             << " bound=" << rep.bound << " (eps=" << rep.epsilon
             << ", delta=" << rep.delta_limit << ", grid slack=" << rep.grid_slack << ")";
        if (!rep.failure_note.empty()) text << "  " << rep.failure_note;
        text << "\n";
      }
    }

    io::ensure_directory(out_dir);
    io::write_text_file(out_dir + "/epi_report.csv", csv);
    io::write_text_file(out_dir + "/epi_report.txt",
                        io::artifact_header(config.config_hash, config.seed) + text.str());
    if (!all_pass) return {1, "gap demo FAILED\n" + text.str()};
    return {0, "gap bound holds on all problems\n" + text.str()};
  });
}

}  // namespace ouu::run
