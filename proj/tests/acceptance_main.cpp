// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ouu/config.hpp"
#include "ouu/csv.hpp"
#include "ouu/epi.hpp"
#include "ouu/experiment.hpp"
#include "ouu/fem.hpp"
#include "ouu/optimizer.hpp"
#include "ouu/risk.hpp"
#include "ouu/rng.hpp"
#include "ouu/saa.hpp"

using namespace ouu;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(int criterion, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [pass, detail] = body();
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof(buf), " [%.1fs]", dt);
    report(criterion, pass, detail + buf);
  } catch (const std::exception& e) {
    report(criterion, false, std::string("exception: ") + e.what());
  }
}

std::string config_path(const char* name) {
  return std::string(OUU_SOURCE_DIR) + "/configs/" + name;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("ouu_acceptance_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

opt::OuterInputs outer_inputs_from(const cfg::InstanceConfig& inst, std::uint64_t seed,
                                   int nu_ref) {
  opt::OuterInputs in;
  in.mesh = inst.state_mesh();
  in.control_mesh = inst.control_mesh();
  in.pde = inst.pde;
  in.qoi = inst.qoi;
  in.theta_reg = inst.theta_reg;
  in.mode = inst.mode;
  in.field = inst.field;
  in.seed = seed;
  in.threads = 1;
  in.start = inst.start();
  in.nu_ref = nu_ref;
  return in;
}

// ---- criterion 1 -------------------------------------------------------
std::pair<bool, std::string> criterion_fem_rate() {
  const double pi = 3.14159265358979323846;
  fem::PdeData data;
  data.c1 = ScalarField::constant(1.0);
  data.c2 = {1.0, 1.0};
  data.s_e = {-pi, -pi};
  auto field = std::make_shared<FieldSpec>();
  field->domain = {0.0, 1.0};
  const FieldSample xi = sample_field(std::shared_ptr<const FieldSpec>(field), 0);

  std::vector<std::pair<double, double>> pts;
  for (int n : {16, 32, 64, 128, 256}) {
    const Mesh m = Mesh::uniform(n, {0.0, 1.0});
    P0Control z = P0Control::zeros(n);
    for (int i = 0; i < n; ++i)
      z.coeffs[static_cast<size_t>(i)] =
          pi * pi * std::sin(pi * 0.5 * (m.node(i) + m.node(i + 1)));
    const P1State u = fem::solve_state(m, xi, data, z);
    pts.emplace_back(m.h(), l2_error(m, u, [&](double x) { return std::sin(pi * x); }));
  }
  const double rate = fem::estimate_rate(pts);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "manufactured sin(pi x) L2 order %.3f >= 1.9 (err@h=1/256: %.3e)", rate,
                pts.back().second);
  return {rate >= 1.9, buf};
}

// ---- criterion 2 -------------------------------------------------------
std::pair<bool, std::string> criterion_refinement_decay() {
  const cfg::ExperimentConfig c = cfg::load_config_file(config_path("verify.json"));
  const cfg::InstanceConfig& inst = c.require_instance();
  const Mesh cmesh = inst.control_mesh();
  const P0Control z{inst.z0};
  double min_order = 1e300;
  for (int s = 0; s < 20; ++s) {
    const FieldSample xi = sample_field(
        inst.field, rng::derive_seed(c.seed, 0x44454341u, static_cast<std::uint64_t>(s)));
    std::vector<std::pair<double, double>> pts;
    for (int n : {16, 32, 64}) {
      const Mesh coarse = Mesh::uniform(n, inst.domain);
      const Mesh fine = Mesh::uniform(2 * n, inst.domain);
      const P1State uc = fem::solve_state(coarse, xi, inst.pde, cmesh, z);
      const P1State uf = fem::solve_state(fine, xi, inst.pde, cmesh, z);
      P1State diff = p1_interpolate(coarse, uc, fine);
      for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= uf.values[i];
      pts.emplace_back(coarse.h(), l2_norm(fine, diff));
    }
    min_order = std::min(min_order, fem::estimate_rate(pts));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "per-sample refinement order >= 1 (min over 20 samples: %.3f)",
                min_order);
  return {min_order >= 1.0, buf};
}

// ---- criterion 3 -------------------------------------------------------
std::pair<bool, std::string> criterion_smax_bound() {
  double worst_ratio = 0.0;
  bool nonneg = true;
  for (double beta : {1.0, 0.1, 0.01}) {
    for (long i = 0; i <= 20000; ++i) {
      const double g = -100.0 + static_cast<double>(i) * 1e-2;
      const double dev = risk::smax(g, beta) - std::max(0.0, g);
      nonneg = nonneg && dev >= 0.0;
      worst_ratio = std::max(worst_ratio, dev / beta);
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "0 <= smax-max and sup dev/beta = %.6f <= 2 (exact bound)",
                worst_ratio);
  return {nonneg && worst_ratio <= 2.0, buf};
}

// ---- criterion 4 -------------------------------------------------------
std::pair<bool, std::string> criterion_superquantile_oracle() {
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const risk::DiscreteRv rv = oracles::random_law(rng::combine(40, static_cast<std::uint64_t>(k)));
    const double alpha = 0.98 * rng::uniform01(rng::combine(41, static_cast<std::uint64_t>(k)));
    worst = std::max(worst, std::fabs(risk::superquantile(rv, alpha) -
                                      oracles::sorted_tail_average(rv.values, rv.weights, alpha)));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "1000 laws: max |minimization - tail average| = %.2e <= 1e-10",
                worst);
  return {worst <= 1e-10, buf};
}

// ---- criterion 5 -------------------------------------------------------
std::pair<bool, std::string> criterion_duality() {
  int violations = 0;
  for (int k = 0; k < 200; ++k) {
    const risk::DiscreteRv rv = oracles::random_law(rng::combine(50, static_cast<std::uint64_t>(k)));
    const double bp = risk::buffered_probability(rv);
    for (int a = 0; a < 25; ++a) {
      const double alpha = 0.02 + 0.96 * a / 24.0;
      const double sq = risk::superquantile(rv, alpha);
      if (sq <= -1e-9 && !(bp <= 1.0 - alpha + 1e-9)) ++violations;
      if (sq >= 1e-9 && !(bp >= 1.0 - alpha - 1e-9)) ++violations;
    }
  }
  const double c1 = risk::buffered_probability(risk::DiscreteRv::uniform({-1.0, -2.0}));
  const double c2 = risk::buffered_probability(risk::DiscreteRv::uniform({-1.0, 1.0}));
  const double c3 = risk::buffered_probability(risk::DiscreteRv::uniform({-3.0, 1.0}));
  const bool closed =
      c1 == 0.0 && c2 == 1.0 && std::fabs(c3 - 2.0 / 3.0) <= 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "duality sweep violations: %d; closed cases {0, 1, 2/3}: {%g, %g, %.10f}",
                violations, c1, c2, c3);
  return {violations == 0 && closed, buf};
}

// ---- criterion 6 -------------------------------------------------------
std::pair<bool, std::string> criterion_gradients() {
  double worst = 0.0;
  int count = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::uint64_t key = rng::combine(60, static_cast<std::uint64_t>(inst));
    const int n = (inst % 2 == 0) ? 4 : 16;
    const int nu = (inst % 4 < 2) ? 8 : 32;

    auto field = std::make_shared<FieldSpec>();
    field->domain = {0.0, 1.0};
    field->modes.push_back(ScalarField::piecewise(
        {0.0, 0.5, 1.0}, {0.1 + 0.3 * rng::uniform01(rng::combine(key, 1)),
                          -0.3 * rng::uniform01(rng::combine(key, 2))}));
    field->modes.push_back(ScalarField::piecewise(
        {0.0, 0.3, 0.8, 1.0}, {-0.2 * rng::uniform01(rng::combine(key, 3)),
                               0.25 * rng::uniform01(rng::combine(key, 4)),
                               0.15 * rng::uniform01(rng::combine(key, 5))}));

    saa::SaaSpec spec;
    spec.mesh = Mesh::uniform(16, {0.0, 1.0});
    spec.control_mesh = Mesh::uniform(n, {0.0, 1.0});
    spec.samples = sample_batch(std::shared_ptr<const FieldSpec>(field), key,
                                rng::kStreamTraining, 0, nu);
    spec.pde.c1 = ScalarField::constant(1.0);
    spec.pde.c2 = {1.0, 1.0};
    spec.pde.s_e = {0.1, -0.1};
    spec.qoi.s_d = ScalarField::constant(0.15);
    spec.qoi.target_window = {0.2, 0.8};
    spec.qoi.s_t = 0.05 + 0.1 * rng::uniform01(rng::combine(key, 6));
    spec.qoi.alpha = 0.3 + 0.5 * rng::uniform01(rng::combine(key, 7));
    spec.theta_reg = 0.05;
    spec.mode = saa::ObjectiveMode::Buffered;
    spec.al = {0.5 * rng::uniform01(rng::combine(key, 8)),
               2.0 + 8.0 * rng::uniform01(rng::combine(key, 9)),
               0.05 + 0.05 * rng::uniform01(rng::combine(key, 10))};
    saa::SaaProblem problem(spec);

    saa::ControlPoint cp;
    cp.box = {-2.0, 2.0};
    cp.z.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      cp.z[static_cast<size_t>(i)] =
          -1.5 + 3.0 * rng::uniform01(rng::derive_seed(key, 11, static_cast<std::uint64_t>(i)));
    cp.gamma = -0.2 + 0.4 * rng::uniform01(rng::combine(key, 12));
    cp.sigma = 0.3 * rng::uniform01(rng::combine(key, 13));

    const saa::Gradient g = problem.gradient(cp);
    std::vector<double> packed = g.z;
    packed.push_back(g.gamma);
    packed.push_back(g.sigma);

    std::vector<double> x = cp.z;
    x.push_back(cp.gamma);
    x.push_back(cp.sigma);
    auto f = [&](const std::vector<double>& v) {
      saa::ControlPoint p = cp;
      p.z.assign(v.begin(), v.end() - 2);
      p.gamma = v[v.size() - 2];
      p.sigma = v[v.size() - 1];
      return problem.value(p);
    };
    const std::vector<double> fd = oracles::central_differences(f, x, 1e-5);
    for (size_t i = 0; i < fd.size(); ++i) {
      const double rel = std::fabs(packed[i] - fd[i]) / std::max(std::fabs(fd[i]), 1e-3);
      worst = std::max(worst, rel);
      ++count;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "50 buffered instances, %d coordinates: max relative error %.2e <= 1e-6", count,
                worst);
  return {worst <= 1e-6, buf};
}

// ---- criterion 7 -------------------------------------------------------
std::pair<bool, std::string> criterion_convex_gap() {
  const cfg::ExperimentConfig c = cfg::load_config_file(config_path("convex_expectation.json"));
  const cfg::InstanceConfig& inst = c.require_instance();
  const opt::GapCertificate cert =
      opt::outer_loop(outer_inputs_from(inst, c.seed, c.nu_ref), c.require_schedule());

  const double recorded = cert.stages.back().value;
  // Standard error of the recorded value: per-sample g1 spread at the
  // final point over the training sample.
  saa::SaaSpec spec;
  spec.mesh = inst.state_mesh();
  spec.control_mesh = inst.control_mesh();
  spec.samples = sample_batch(inst.field, c.seed, rng::kStreamTraining, 0,
                              c.require_schedule().stages.back().nu);
  spec.pde = inst.pde;
  spec.qoi = inst.qoi;
  spec.theta_reg = inst.theta_reg;
  spec.mode = saa::ObjectiveMode::Expectation;
  const saa::Evaluation train_eval = saa::SaaProblem(spec).evaluate(cert.final_point, false);
  double m = 0.0, m2 = 0.0;
  for (double v : train_eval.sample_g1) {
    m += v;
    m2 += v * v;
  }
  const int nu = static_cast<int>(train_eval.sample_g1.size());
  m /= nu;
  m2 /= nu;
  const double se_train = std::sqrt(std::max(0.0, m2 - m * m) / (nu - 1));
  const double se = std::sqrt(se_train * se_train + cert.ref_value_se * cert.ref_value_se);
  const double delta_term = cert.delta_limit * (1.0 + std::fabs(recorded));
  const double gap = std::fabs(cert.ref_value - recorded);
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "|ref %.6f - recorded %.6f| = %.2e <= 3se+delta = %.2e (se %.2e)",
                cert.ref_value, recorded, gap, 3.0 * se + delta_term, se);
  return {gap <= 3.0 * se + delta_term, buf};
}

// ---- criterion 8 -------------------------------------------------------
std::pair<bool, std::string> criterion_buffered_pipeline() {
  const cfg::ExperimentConfig c = cfg::load_config_file(config_path("buffered.json"));
  const cfg::InstanceConfig& inst = c.require_instance();
  const opt::Schedule& sched = c.require_schedule();
  const opt::GapCertificate cert =
      opt::outer_loop(outer_inputs_from(inst, c.seed, c.nu_ref), sched);

  bool stages_ok = cert.stages.size() == 4;
  bool budget_ok = true;
  for (size_t k = 0; k < cert.stages.size(); ++k) {
    const auto& st = cert.stages[k];
    stages_ok = stages_ok && !st.failed;
    const double expected_budget = 2.0 * sched.stages[k].beta / (1.0 - inst.qoi.alpha);
    budget_ok = budget_ok && std::fabs(st.smoothing_budget - expected_budget) <= 1e-15;
    budget_ok =
        budget_ok && std::fabs(st.residual_smooth - st.residual_nonsmooth) <= expected_budget;
  }
  const double psi = cert.ref_residual;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "|psi-hat(nu=10^4)| = %.2e <= 1e-3; budgets 2b/(1-a) match and bound the "
                "smooth/nonsmooth split: %s",
                std::fabs(psi), budget_ok ? "yes" : "no");
  return {stages_ok && budget_ok && std::fabs(psi) <= 1e-3, buf};
}

// ---- criterion 9 -------------------------------------------------------
std::pair<bool, std::string> criterion_epi_gap() {
  const cfg::ExperimentConfig c = cfg::load_config_file(config_path("epi_demo.json"));
  int failures = 0;
  int runs = 0;
  for (const auto& p : epi::bundled_problems()) {
    for (std::uint64_t seed : c.epi.seeds) {
      const epi::GapDemoReport rep = epi::run_gap_demo(p, c.epi.epsilon, c.epi.stages, seed);
      ++runs;
      if (!rep.pass) ++failures;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "gap bound f(T_n(x)) <= inf+eps+delta+slack: %d/%d runs pass",
                runs - failures, runs);
  return {failures == 0, buf};
}

// ---- criterion 10 ------------------------------------------------------
std::pair<bool, std::string> criterion_embedding_identity() {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng::uniform01(rng::combine(100, trial)) * 64.0);
    const Mesh m = Mesh::uniform(n, {0.0, 1.0});
    P0Control z = P0Control::zeros(n);
    double n2 = 0.0;
    for (int i = 0; i < n; ++i) {
      z.coeffs[static_cast<size_t>(i)] =
          -5.0 +
          10.0 * rng::uniform01(rng::derive_seed(101, static_cast<std::uint64_t>(trial),
                                                 static_cast<std::uint64_t>(i)));
      n2 += z.coeffs[static_cast<size_t>(i)] * z.coeffs[static_cast<size_t>(i)];
    }
    const double lhs = embed_control_norm(m, z);
    const double rhs = std::sqrt(m.h()) * std::sqrt(n2);
    worst = std::max(worst, std::fabs(lhs - rhs) / std::max(1.0, rhs));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "||T_n z|| = sqrt(h)||z||_2: max deviation %.2e <= 1e-14",
                worst);
  return {worst <= 1e-14, buf};
}

// ---- criterion 11 ------------------------------------------------------
std::pair<bool, std::string> criterion_integrability() {
  const double corners[4][2] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 3.0}, {1.0, 3.0}};
  bool all_finite = true;
  for (const char* name : {"verify.json", "buffered.json", "convex_expectation.json"}) {
    const cfg::ExperimentConfig c = cfg::load_config_file(config_path(name));
    for (const auto& pq : corners) {
      const ProbeEstimate e =
          integrability_probe(c.require_instance().field, pq[0], pq[1], 20000, c.seed);
      all_finite = all_finite && std::isfinite(e.mean) && std::isfinite(e.standard_error);
    }
  }
  // Constant-mode spec against the lognormal moment oracle
  // E[e^{(p-q)y}] = e^{(p-q)^2/2}.
  auto cspec = std::make_shared<FieldSpec>();
  cspec->domain = {0.0, 1.0};
  cspec->modes.push_back(ScalarField::constant(1.0));
  bool within = true;
  double worst_ratio = 0.0;
  for (const auto& pq : corners) {
    const ProbeEstimate e = integrability_probe(std::shared_ptr<const FieldSpec>(cspec), pq[0],
                                                pq[1], 100000, 2026);
    const double exact = std::exp(0.5 * (pq[0] - pq[1]) * (pq[0] - pq[1]));
    const double dev = std::fabs(e.mean - exact);
    if (e.standard_error > 0.0) worst_ratio = std::max(worst_ratio, dev / e.standard_error);
    within = within && dev <= 3.0 * e.standard_error + 1e-12;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "bundled-spec corners finite: %s; constant-mode vs lognormal oracle: worst "
                "dev/se = %.2f <= 3",
                all_finite ? "yes" : "no", worst_ratio);
  return {all_finite && within, buf};
}

// ---- criterion 12 ------------------------------------------------------
std::pair<bool, std::string> criterion_determinism() {
  const cfg::ExperimentConfig c = cfg::load_config_file(config_path("convex_expectation.json"));
  const auto dir1 = scratch_dir("det1");
  const auto dir2 = scratch_dir("det2");
  const run::CommandResult r1 = run::optimize(c, dir1.string(), std::nullopt, std::nullopt);
  const run::CommandResult r2 = run::optimize(c, dir2.string(), std::nullopt, std::nullopt);
  const bool same_tx = slurp(dir1 / "certificate.txt") == slurp(dir2 / "certificate.txt");
  const bool same_csv = slurp(dir1 / "certificate.csv") == slurp(dir2 / "certificate.csv");
  const bool same_trace = slurp(dir1 / "trace.csv") == slurp(dir2 / "trace.csv");
  const bool nonempty = !slurp(dir1 / "certificate.txt").empty();
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "repeated optimize runs byte-identical (txt %d, csv %d, trace %d; status %d/%d)",
                same_tx, same_csv, same_trace, r1.status, r2.status);
  return {same_tx && same_csv && same_trace && nonempty && r1.status == r2.status, buf};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run_criterion(1, criterion_fem_rate);
  run_criterion(2, criterion_refinement_decay);
  run_criterion(3, criterion_smax_bound);
  run_criterion(4, criterion_superquantile_oracle);
  run_criterion(5, criterion_duality);
  run_criterion(6, criterion_gradients);
  run_criterion(7, criterion_convex_gap);
  run_criterion(8, criterion_buffered_pipeline);
  run_criterion(9, criterion_epi_gap);
  run_criterion(10, criterion_embedding_identity);
  run_criterion(11, criterion_integrability);
  run_criterion(12, criterion_determinism);
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
