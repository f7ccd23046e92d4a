#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "ouu/config.hpp"
#include "ouu/csv.hpp"
#include "ouu/errors.hpp"
#include "ouu/experiment.hpp"

using namespace ouu;

namespace {

const char* kGoodConfig = R"JSON({
  "instance": {
    "domain": [0.0, 1.0],
    "state_elements": 16,
    "control_elements": 4,
    "pde": {"c1": {"kind": "constant", "value": 1.0}, "c2": [1.0, 1.0], "s_e": [-1.0, -1.0]},
    "field": {"b0": {"kind": "constant", "value": 0.0},
              "modes": [{"kind": "piecewise", "breakpoints": [0.0, 0.5, 1.0], "values": [0.2, -0.1]}]},
    "qoi": {"s_d": {"kind": "constant", "value": 0.0}, "target_window": [0.25, 0.75],
            "s_t": 0.1, "alpha": 0.5},
    "theta_reg": 0.01,
    "mode": "buffered",
    "box": [-2.0, 2.0],
    "initial": {"z": 0.5, "gamma": -0.1, "sigma": 0.2}
  },
  "schedule": {
    "stages": [{"nu": 8, "beta": 0.05, "theta_pen": 10.0, "delta": 0.0001, "max_inner_iters": 50}],
    "multiplier_rule": "augmented-lagrangian-update",
    "y_max": 1000.0
  },
  "seed": 7,
  "threads": 1,
  "output_dir": "out",
  "feasibility_tolerance": 0.001,
  "nu_ref": 64
})JSON";

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("ouu_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config parses and validates") {
  const cfg::ExperimentConfig c = cfg::parse_config(kGoodConfig);
  REQUIRE(c.instance.has_value());
  REQUIRE(c.schedule.has_value());
  CHECK(c.instance->state_elements == 16);
  CHECK(c.instance->control_elements == 4);
  CHECK(c.instance->mode == saa::ObjectiveMode::Buffered);
  CHECK(c.instance->field->truncation() == 1);
  CHECK(c.instance->z0 == std::vector<double>(4, 0.5));
  CHECK(c.schedule->stages.size() == 1);
  CHECK(c.seed == 7);
  CHECK(c.config_hash != 0);
}

TEST_CASE("config hash is formatting-insensitive but content-sensitive") {
  const cfg::ExperimentConfig a = cfg::parse_config(kGoodConfig);
  std::string spaced = kGoodConfig;
  spaced.insert(spaced.find("\"seed\""), "\n\n   ");
  CHECK(cfg::parse_config(spaced).config_hash == a.config_hash);
  std::string changed = kGoodConfig;
  changed.replace(changed.find("\"seed\": 7"), 9, "\"seed\": 8");
  CHECK(cfg::parse_config(changed).config_hash != a.config_hash);
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(cfg::parse_config("{nope"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config(R"({"bogus_key": 1})"), ConfigError);

  std::string bad = kGoodConfig;
  bad.replace(bad.find("\"theta_reg\""), 11, "\"theta_rig\"");
  CHECK_THROWS_AS(cfg::parse_config(bad), ConfigError);

  std::string neg = kGoodConfig;
  neg.replace(neg.find("\"theta_reg\": 0.01"), 17, "\"theta_reg\": -1.0");
  CHECK_THROWS_AS(cfg::parse_config(neg), ConfigError);

  std::string bad_alpha = kGoodConfig;
  bad_alpha.replace(bad_alpha.find("\"alpha\": 0.5"), 12, "\"alpha\": 1.5");
  CHECK_THROWS_AS(cfg::parse_config(bad_alpha), ConfigError);

  // Decreasing sample sizes are rejected at validation.
  std::string sched = kGoodConfig;
  sched.replace(sched.find("\"stages\": [{\"nu\": 8,"), 21,
                "\"stages\": [{\"nu\": 9, \"beta\": 0.05, \"theta_pen\": 10.0, \"delta\": 0.0001,"
                " \"max_inner_iters\": 50}, {\"nu\": 8,");
  CHECK_THROWS_AS(cfg::parse_config(sched), ConfigError);
}

TEST_CASE("value csv reading") {
  const auto dir = temp_dir("csv");
  const auto path = (dir / "values.csv").string();
  io::write_text_file(path, "# comment\nvalue,weight\n1.5,2\n-0.5,1\n3.25,1\n");
  const io::ValueTable t = io::read_value_csv(path);
  REQUIRE(t.values.size() == 3);
  CHECK(t.values[0] == 1.5);
  REQUIRE(t.weights.size() == 3);
  CHECK(t.weights[0] == 2.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("risk eval command") {
  const auto dir = temp_dir("riskeval");
  const auto path = (dir / "values.csv").string();
  io::write_text_file(path, "-3\n1\n");
  const run::CommandResult r = run::risk_eval(path, 0.5, dir.string());
  CHECK(r.status == 0);
  CHECK(r.message.find("buffered_probability") != std::string::npos);
  std::ifstream metrics(dir / "risk_metrics.csv");
  const std::string body((std::istreambuf_iterator<char>(metrics)),
                         std::istreambuf_iterator<char>());
  CHECK(body.find("superquantile,") != std::string::npos);
  const run::CommandResult bad = run::risk_eval(path, 1.5, "");
  CHECK(bad.status == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve-pde runner: golden oracle agreement and byte determinism") {
  const auto dir = temp_dir("solvepde");
  cfg::ExperimentConfig c = cfg::parse_config(kGoodConfig);
  const run::CommandResult r = run::solve_pde(c, dir.string(), std::nullopt);
  REQUIRE(r.status == 0);

  const auto rows = io::read_numeric_csv((dir / "state.csv").string());
  REQUIRE(static_cast<int>(rows.size()) == 17);

  // Independent dense oracle on the same instance.
  const FieldSample xi = sample_field(c.instance->field, c.seed);
  const std::vector<double> expect = oracles::dense_robin_solve(
      16, 0.0, 1.0, [&](double x) { return xi(x); }, 1.0, 1.0, 1.0, -1.0, -1.0,
      std::vector<double>(4, 0.5));
  for (int i = 0; i < 17; ++i) {
    CHECK(rows[static_cast<size_t>(i)][0] == doctest::Approx(i / 16.0).epsilon(1e-15));
    CHECK(rows[static_cast<size_t>(i)][1] ==
          doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-12));
  }

  const std::string first = slurp(dir / "state.csv");
  REQUIRE(run::solve_pde(c, dir.string(), std::nullopt).status == 0);
  CHECK(slurp(dir / "state.csv") == first);
  CHECK(first.rfind("# config_hash=", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("solve-pde runner: zero data produces the zero column") {
  std::string zero = kGoodConfig;
  zero.replace(zero.find("\"s_e\": [-1.0, -1.0]"), 19, "\"s_e\": [0.0, 0.0]");
  zero.replace(zero.find("\"initial\": {\"z\": 0.5"), 20, "\"initial\": {\"z\": 0.0");
  cfg::ExperimentConfig c = cfg::parse_config(zero);
  const auto dir = temp_dir("solvezero");
  REQUIRE(run::solve_pde(c, dir.string(), std::nullopt).status == 0);
  for (const auto& row : io::read_numeric_csv((dir / "state.csv").string()))
    CHECK(std::fabs(row[1]) <= 1e-14);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sample-field runner writes one column per sample") {
  cfg::ExperimentConfig c = cfg::parse_config(kGoodConfig);
  const auto dir = temp_dir("samplefield");
  REQUIRE(run::sample_field_cmd(c, dir.string()).status == 0);
  const auto rows = io::read_numeric_csv((dir / "field_samples.csv").string());
  REQUIRE(static_cast<int>(rows.size()) == c.sample_field.grid_points);
  CHECK(rows[0].size() == static_cast<size_t>(1 + c.sample_field.count));
  std::filesystem::remove_all(dir);
}

TEST_CASE("optimize runner writes deterministic certificates") {
  cfg::ExperimentConfig c = cfg::parse_config(kGoodConfig);
  const auto dir1 = temp_dir("opt1");
  const auto dir2 = temp_dir("opt2");
  const run::CommandResult r1 = run::optimize(c, dir1.string(), std::nullopt, std::nullopt);
  INFO(r1.message);
  REQUIRE((r1.status == 0 || r1.status == 1));
  const run::CommandResult r2 = run::optimize(c, dir2.string(), std::nullopt, std::nullopt);
  CHECK(r1.status == r2.status);
  CHECK(slurp(dir1 / "certificate.txt") == slurp(dir2 / "certificate.txt"));
  CHECK(slurp(dir1 / "certificate.csv") == slurp(dir2 / "certificate.csv"));
  CHECK(slurp(dir1 / "trace.csv") == slurp(dir2 / "trace.csv"));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("verify runner: negative control fails with status 1") {
  cfg::ExperimentConfig c =
      cfg::load_config_file(std::string(OUU_SOURCE_DIR) + "/configs/verify.json");
  c.verify.rate_min = 5.0;  // unattainable on purpose
  const auto dir = temp_dir("verifyneg");
  const run::CommandResult r = run::verify(c, dir.string());
  CHECK(r.status == 1);
  CHECK(r.message.find("FAIL") != std::string::npos);
  const std::string report = slurp(dir / "verify_report.txt");
  CHECK(report.find("[FAIL] fem_manufactured_rate") != std::string::npos);
  CHECK(report.find("[PASS] smax_bound") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("epi demo runner: quick schedule") {
  cfg::ExperimentConfig c = cfg::parse_config(R"({
    "seed": 5,
    "epi_demo": {"epsilon": 0.001,
                 "stages": [{"nu": 10, "delta": 0.3}, {"nu": 100, "delta": 0.05}],
                 "seeds": [1]}
  })");
  const auto dir = temp_dir("epidemo");
  const run::CommandResult r = run::epi_demo(c, dir.string());
  INFO(r.message);
  CHECK(r.status == 0);
  const std::string csv = slurp(dir / "epi_report.csv");
  CHECK(csv.find("representable-step") != std::string::npos);
  CHECK(csv.find("ramp") != std::string::npos);
  const std::string report = slurp(dir / "epi_report.txt");
  CHECK(report.find("[PASS]") != std::string::npos);
  CHECK(report.find("[FAIL]") == std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("optimize runner: worker count does not change the certificate") {
  cfg::ExperimentConfig c = cfg::parse_config(kGoodConfig);
  const auto dir1 = temp_dir("thr1");
  const auto dir4 = temp_dir("thr4");
  REQUIRE(run::optimize(c, dir1.string(), std::nullopt, 1).status <= 1);
  REQUIRE(run::optimize(c, dir4.string(), std::nullopt, 4).status <= 1);
  CHECK(slurp(dir1 / "certificate.txt") == slurp(dir4 / "certificate.txt"));
  CHECK(slurp(dir1 / "trace.csv") == slurp(dir4 / "trace.csv"));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir4);
}

TEST_CASE("missing sections are reported as config errors") {
  cfg::ExperimentConfig empty = cfg::parse_config("{}");
  CHECK(run::solve_pde(empty, "unused", std::nullopt).status == 2);
  CHECK(run::optimize(empty, "unused", std::nullopt, std::nullopt).status == 2);
}
