#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "entacc/errors.hpp"
#include "entacc/sweep.hpp"

using namespace entacc;

namespace {

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

SweepConfig config(std::vector<double> r, std::vector<double> k, double x = 0.5) {
  SweepConfig c;
  c.r_grid = std::move(r);
  c.k_grid = std::move(k);
  c.x = x;
  c.samples_per_cell = 4000;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(config({}, {1e-4})), InvalidInput);
  CHECK_THROWS_AS(validate(config({0.5, 0.1}, {1e-4})), InvalidInput);
  CHECK_THROWS_AS(validate(config({0.1, 0.1}, {1e-4})), InvalidInput);
  CHECK_THROWS_AS(validate(config({0.1}, {-1e-4})), InvalidInput);
  CHECK_NOTHROW(validate(config({0.0, 0.1}, {0.0, 1e-4})));
  auto c = config({0.1}, {1e-4});
  c.t_max = -1.0;
  CHECK_THROWS_AS(validate(c), InvalidInput);
  CHECK_THROWS_AS(run_sweep(config({}, {})), InvalidInput);
}

TEST_CASE("default cell horizon") {
  const auto th = thermal_point(0.5);
  const double rate = th.n2b * (1.0 - th.n2b);
  CHECK(default_cell_t_max(0.0, 1e-4, th, 1.0) ==
        doctest::Approx((std::log(1e4) + 20.0) / (2.0 * rate) + 40.0 / rate));
  CHECK(std::isfinite(default_cell_t_max(2.0, 1e-4, th, 1.0)));
  CHECK(default_cell_t_max(2.5, 1e-4, th, 2.0) == doctest::Approx(default_cell_t_max(2.5, 1e-4, th, 1.0) / 2.0));
}

TEST_CASE("scrambling example: plateau independent of Kt and on the analytic line") {
  const auto res = run_sweep(config({0.01}, {1e-6, 1e-4}));
  REQUIRE(res.failures == 0);
  REQUIRE(res.rows.size() == 2);
  const auto& a = res.rows[0];
  const auto& b = res.rows[1];
  CHECK(a.k == 1e-6);
  CHECK(b.k == 1e-4);
  REQUIRE(a.plateau_numeric);
  REQUIRE(b.plateau_numeric);
  CHECK(*a.plateau_numeric == doctest::Approx(*b.plateau_numeric).epsilon(0.02));
  CHECK(*a.plateau_numeric == doctest::Approx(a.saturation_analytic).epsilon(0.02));
  CHECK(*b.plateau_numeric == doctest::Approx(b.saturation_analytic).epsilon(0.02));
  CHECK(a.phase == Phase::Scrambling);
  REQUIRE(a.t_sat);
  REQUIRE(b.t_sat);
  CHECK(*a.t_sat > *b.t_sat);
}

TEST_CASE("dissipative example: plateau ratio tracks Kt") {
  const auto res = run_sweep(config({2.5}, {1e-3, 1e-2}));
  REQUIRE(res.failures == 0);
  const double ratio = *res.rows[1].plateau_numeric / *res.rows[0].plateau_numeric;
  CHECK(ratio == doctest::Approx(10.0).epsilon(0.10));
  CHECK(res.rows[0].saturation_analytic == 0.0);
  CHECK(res.rows[0].phase == Phase::Dissipative);
}

TEST_CASE("threshold row has zero analytic saturation") {
  const auto res = run_sweep(config({2.0}, {1e-3}));
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].saturation_analytic == 0.0);
  CHECK(res.rows[0].phase == Phase::Critical);
}

TEST_CASE("table layout") {
  CHECK(sweep_to_table({}) == "r,k,x,phase,lyapunov,plateau_numeric,saturation_analytic,t_sat\n");

  SweepRow row;
  row.r = 0.5;
  row.k = 1e-4;
  row.x = 0.5;
  row.phase = Phase::Scrambling;
  row.lyapunov = 0.25;
  row.plateau_numeric = 0.125;
  row.saturation_analytic = 0.125;
  std::vector<SweepRow> one{row};
  const auto text = sweep_to_table(one);
  CHECK(line_count(text) == 2);
  CHECK(text.substr(text.find('\n') + 1) == "0.5,0.0001,0.5,scrambling,0.25,0.125,0.125,\n");

  std::vector<SweepRow> grid(15, row);
  CHECK(line_count(sweep_to_table(grid)) == 16);

  grid[3].error = "boom";
  const auto with_error = sweep_to_table(grid);
  CHECK(with_error.find(",error,") != std::string::npos);
  CHECK(line_count(with_error) == 16);
}

TEST_CASE("5 x 3 sweep: grid order, determinism across schedules, monotone in r") {
  auto cfg = config({0.0, 0.5, 1.0, 1.5, 1.9}, {1e-6, 1e-5, 1e-4});
  const auto serial = run_sweep(cfg, 1);
  const auto parallel = run_sweep(cfg, 4);
  REQUIRE(serial.failures == 0);
  REQUIRE(serial.rows.size() == 15);
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(serial.rows[i].r == cfg.r_grid[i / 3]);
    CHECK(serial.rows[i].k == cfg.k_grid[i % 3]);
  }
  const auto table = sweep_to_table(serial.rows);
  CHECK(line_count(table) == 16);
  CHECK(table == sweep_to_table(parallel.rows));
  CHECK(table == sweep_to_table(run_sweep(cfg, 1).rows));

  for (std::size_t i = 3; i < 15; ++i) {
    const auto& prev = serial.rows[i - 3];
    const auto& cur = serial.rows[i];
    if (cur.k != 1e-6) continue;
    CHECK(*cur.plateau_numeric <= *prev.plateau_numeric + 1e-6);
  }
  for (const auto& row : serial.rows) {
    CHECK(*row.plateau_numeric >= 0.0);
    CHECK(*row.plateau_numeric <= 2.0);
    const auto rep = classify(couplings_from_ratios(row.r, row.k), thermal_point(row.x));
    CHECK(row.saturation_analytic == rep.saturation);
    CHECK(row.lyapunov == rep.lyapunov);
  }
}

TEST_CASE("failed cells carry a marker and are counted") {
  auto cfg = config({0.5, 2.5}, {1e-4});
  cfg.t_max = 5.0;  // far too short to reach a plateau in either phase
  const auto res = run_sweep(cfg, 2);
  CHECK(res.failures == 2);
  for (const auto& row : res.rows) {
    REQUIRE(row.error);
    CHECK_FALSE(row.t_sat);
  }
  CHECK(res.rows[0].phase == Phase::Scrambling);
  CHECK(res.rows[1].phase == Phase::Dissipative);
  CHECK_THROWS_AS(run_cell(cfg, 0.5, 1e-4), InsufficientData);

  const auto manifest = nlohmann::json::parse(sweep_manifest(cfg, res));
  CHECK(manifest["failures"] == 2);
  CHECK(manifest["cells"] == 2);
  CHECK(manifest["t_max"] == 5.0);
  CHECK(manifest["r_grid"].size() == 2);
}
