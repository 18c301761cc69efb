#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entacc/analytics.hpp"
#include "entacc/kinetics.hpp"

namespace entacc {

struct SweepConfig {
  std::vector<double> r_grid;  ///< Vt/Jt, strictly increasing
  std::vector<double> k_grid;  ///< Kt/Jt, strictly increasing
  double x = 0.5;
  double Jt = 1.0;
  /// Tolerances and plateau settings shared by every cell.
  IntegratorControls controls;
  /// Unset: per-cell default_cell_t_max().
  std::optional<double> t_max;
  /// Unset: t_max / samples_per_cell.
  std::optional<double> sample_stride;
  std::size_t samples_per_cell = 20000;
};

void validate(const SweepConfig& config);

/// (ln(1/k) + 20) / |kappa| plus two default plateau windows
/// 20 / (n2b (1 - n2b) Jt). |kappa| is floored at 1% of n2b (1 - n2b) Jt so the
/// threshold cell stays finite.
double default_cell_t_max(double r, double k, const ThermalPoint& thermal, double Jt);

struct SweepRow {
  double r = 0.0;
  double k = 0.0;
  double x = 0.0;
  Phase phase = Phase::Critical;
  double lyapunov = 0.0;
  std::optional<double> plateau_numeric;
  double saturation_analytic = 0.0;
  std::optional<double> t_sat;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< row-major: r outer, k inner
  std::size_t failures = 0;
};

/// Runs every (r, k) cell; cells may run on up to `jobs` threads, results are
/// assembled in grid order. Failed cells carry an error and are counted.
SweepResult run_sweep(const SweepConfig& config, std::size_t jobs = 1);

/// Runs one cell; integration failures propagate as exceptions.
SweepRow run_cell(const SweepConfig& config, double r, double k);

/// CSV with header `r,k,x,phase,lyapunov,plateau_numeric,saturation_analytic,t_sat`.
/// Failed cells print `error` for the plateau; a missing t_sat is an empty field.
std::string sweep_to_table(std::span<const SweepRow> rows);

/// Run manifest: echo of the configuration plus the failure count, as JSON.
std::string sweep_manifest(const SweepConfig& config, const SweepResult& result);

}  // namespace entacc
