#include "entacc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "entacc/csv.hpp"
#include "entacc/errors.hpp"

namespace entacc {

namespace {

void validate_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw InvalidInput(fmt::format("sweep: {} is empty", name));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
      throw InvalidInput(fmt::format("sweep: {} values must be finite and >= 0", name));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidInput(fmt::format("sweep: {} must be strictly increasing", name));
    }
  }
}

}  // namespace

void validate(const SweepConfig& config) {
  validate_grid(config.r_grid, "r_grid");
  validate_grid(config.k_grid, "k_grid");
  if (!std::isfinite(config.x)) throw InvalidInput("sweep: x must be finite");
  if (!(config.Jt > 0.0) || !std::isfinite(config.Jt)) throw InvalidInput("sweep: Jt must be positive");
  if (config.t_max && !(*config.t_max > 0.0)) throw InvalidInput("sweep: t_max must be positive");
  if (config.sample_stride && !(*config.sample_stride > 0.0)) {
    throw InvalidInput("sweep: sample_stride must be positive");
  }
  if (config.samples_per_cell < 10) throw InvalidInput("sweep: samples_per_cell must be >= 10");
}

double default_cell_t_max(double r, double k, const ThermalPoint& thermal, double Jt) {
  const double rate_scale = thermal.n2b * (1.0 - thermal.n2b) * Jt;
  const double kappa = std::max(rate_scale * std::abs(2.0 - r), 0.01 * rate_scale);
  const double seed_log = k > 0.0 ? std::log(1.0 / k) : 0.0;
  // Two default plateau windows after the rise: one to settle onto the
  // attractor, one to observe the flat stretch.
  return (std::max(seed_log, 0.0) + 20.0) / kappa + 40.0 / rate_scale;
}

SweepRow run_cell(const SweepConfig& config, double r, double k) {
  const ThermalPoint thermal = thermal_point(config.x);
  const EffectiveCouplings couplings = couplings_from_ratios(r, k, config.Jt);
  const PhaseReport report = classify(couplings, thermal);

  SweepRow row;
  row.r = r;
  row.k = k;
  row.x = config.x;
  row.phase = report.phase;
  row.lyapunov = report.lyapunov;
  row.saturation_analytic = report.saturation;

  IntegratorControls controls = config.controls;
  controls.t_max = config.t_max.value_or(default_cell_t_max(r, k, thermal, config.Jt));
  controls.sample_stride =
      config.sample_stride.value_or(controls.t_max / static_cast<double>(config.samples_per_cell));

  const Trajectory traj = integrate(couplings, thermal, controls);
  if (!traj.plateau) {
    throw InsufficientData(fmt::format("no plateau detected within t_max = {}", controls.t_max));
  }
  row.plateau_numeric = traj.plateau->value;
  row.t_sat = half_rise_time(traj);
  return row;
}

SweepResult run_sweep(const SweepConfig& config, std::size_t jobs) {
  validate(config);
  const std::size_t nk = config.k_grid.size();
  const std::size_t cells = config.r_grid.size() * nk;

  SweepResult result;
  result.rows.resize(cells);

  auto work = [&](std::size_t i) {
    const double r = config.r_grid[i / nk];
    const double k = config.k_grid[i % nk];
    try {
      result.rows[i] = run_cell(config, r, k);
    } catch (const std::exception& e) {
      SweepRow row;
      row.r = r;
      row.k = k;
      row.x = config.x;
      try {
        const auto report = classify(couplings_from_ratios(r, k, config.Jt), thermal_point(config.x));
        row.phase = report.phase;
        row.lyapunov = report.lyapunov;
        row.saturation_analytic = report.saturation;
      } catch (const std::exception&) {
      }
      row.error = e.what();
      result.rows[i] = std::move(row);
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(cells, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < cells; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells; i = next++) work(i);
      });
    }
  }

  result.failures = static_cast<std::size_t>(
      std::count_if(result.rows.begin(), result.rows.end(), [](const auto& r) { return r.error.has_value(); }));
  return result;
}

std::string sweep_to_table(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "r,k,x,phase,lyapunov,plateau_numeric,saturation_analytic,t_sat\n";
  for (const auto& row : rows) {
    os << format_data(row.r) << ',' << format_data(row.k) << ',' << format_data(row.x) << ','
       << phase_name(row.phase) << ',' << format_data(row.lyapunov) << ','
       << (row.plateau_numeric && !row.error ? format_data(*row.plateau_numeric) : "error") << ','
       << format_data(row.saturation_analytic) << ','
       << (row.t_sat ? format_data(*row.t_sat) : "") << '\n';
  }
  return os.str();
}

std::string sweep_manifest(const SweepConfig& config, const SweepResult& result) {
  nlohmann::ordered_json j;
  j["r_grid"] = config.r_grid;
  j["k_grid"] = config.k_grid;
  j["x"] = config.x;
  j["Jt"] = config.Jt;
  j["rel_tol"] = config.controls.rel_tol;
  j["abs_tol"] = config.controls.abs_tol;
  j["max_step"] = std::isfinite(config.controls.max_step) ? nlohmann::ordered_json(config.controls.max_step)
                                                         : nlohmann::ordered_json(nullptr);
  j["plateau_tol"] = config.controls.plateau_tol;
  j["plateau_window"] = config.controls.plateau_window ? nlohmann::ordered_json(*config.controls.plateau_window)
                                                       : nlohmann::ordered_json(nullptr);
  j["t_max"] = config.t_max ? nlohmann::ordered_json(*config.t_max) : nlohmann::ordered_json(nullptr);
  j["sample_stride"] = config.sample_stride ? nlohmann::ordered_json(*config.sample_stride)
                                            : nlohmann::ordered_json(nullptr);
  j["samples_per_cell"] = config.samples_per_cell;
  j["cells"] = result.rows.size();
  j["failures"] = result.failures;
  return j.dump(2);
}

}  // namespace entacc
