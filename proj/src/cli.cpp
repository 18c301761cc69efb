#include "entacc/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "entacc/analytics.hpp"
#include "entacc/config.hpp"
#include "entacc/csv.hpp"
#include "entacc/errors.hpp"
#include "entacc/kinetics.hpp"
#include "entacc/selfcheck.hpp"
#include "entacc/sweep.hpp"

namespace entacc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::size_t jobs = 1;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void check_out_path(const std::string& out) {
  if (out.empty()) return;
  const fs::path parent = fs::absolute(fs::path(out)).parent_path();
  if (!fs::is_directory(parent)) {
    throw ConfigError(fmt::format("output directory '{}' does not exist", parent.string()));
  }
}

// Writes `content` to --out, or to `out` when no path was given.
void emit(const Options& opt, const std::string& content, std::ostream& out) {
  if (opt.out.empty()) {
    out << content;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", opt.out));
  f << content;
}

// Provenance record next to the data file. The timestamp lives only here so
// data files stay byte-identical across runs.
void write_manifest(const Options& opt, const std::string& command, const ConfigFile& file,
                    json effective) {
  if (opt.out.empty()) return;
  json j;
  j["command"] = command;
  j["timestamp"] = utc_timestamp();
  j["config_path"] = opt.config;
  j["output_path"] = opt.out;
  json raw = json::object();
  for (const auto& [name, section] : file.sections()) {
    for (const auto& [key, value] : section) raw[name][key] = value;
  }
  j["config"] = raw;
  j["effective"] = std::move(effective);
  std::ofstream f(opt.out + ".manifest.json", std::ios::trunc);
  f << j.dump(2) << '\n';
}

json controls_json(const IntegratorControls& c) {
  json j;
  j["rel_tol"] = c.rel_tol;
  j["abs_tol"] = c.abs_tol;
  j["max_step"] = std::isfinite(c.max_step) ? json(c.max_step) : json(nullptr);
  j["t_max"] = c.t_max;
  j["sample_stride"] = c.sample_stride;
  j["plateau_tol"] = c.plateau_tol;
  j["plateau_window"] = c.plateau_window ? json(*c.plateau_window) : json(nullptr);
  return j;
}

void print_report(std::ostream& os, const PhaseReport& rep) {
  os << "phase: " << phase_name(rep.phase) << '\n'
     << "lyapunov: " << format_summary(rep.lyapunov) << '\n'
     << "saturation_analytic: " << format_summary(rep.saturation) << '\n';
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto file = ConfigFile::load(opt.config);
  const auto cfg = parse_simulate(file);
  const auto thermal = thermal_point(cfg.x);
  const auto couplings = couplings_from_ratios(cfg.r, cfg.k, cfg.Jt);
  if (probe_limit_violated(couplings)) {
    err << "warning: Kt is not small against Jt, Vt; closed-form results assume Kt -> 0\n";
  }
  const auto traj = integrate(couplings, thermal, cfg.controls, cfg.f3_init);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  emit(opt, csv.str(), out);

  std::ostream& summary = opt.out.empty() ? err : out;
  const auto rep = classify(couplings, thermal);
  print_report(summary, rep);
  summary << "plateau: " << (traj.plateau ? format_summary(traj.plateau->value) : "none") << '\n'
          << "steps: " << traj.accepted_steps << " accepted, " << traj.rejected_steps
          << " rejected\n";

  json eff;
  eff["r"] = cfg.r;
  eff["k"] = cfg.k;
  eff["x"] = cfg.x;
  eff["Jt"] = cfg.Jt;
  eff["f3_init"] = traj.f3_init;
  eff["controls"] = controls_json(cfg.controls);
  write_manifest(opt, "simulate", file, std::move(eff));
  return kOk;
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto file = ConfigFile::load(opt.config);
  const auto cfg = parse_sweep(file);
  std::size_t jobs = opt.jobs;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto result = run_sweep(cfg, jobs);
  emit(opt, sweep_to_table(result.rows), out);

  for (const auto& row : result.rows) {
    if (row.error) err << fmt::format("cell r={} k={} failed: {}\n", row.r, row.k, *row.error);
  }
  std::ostream& summary = opt.out.empty() ? err : out;
  summary << "cells: " << result.rows.size() << ", failures: " << result.failures << '\n';

  auto eff = json::parse(sweep_manifest(cfg, result));
  eff["jobs"] = jobs;
  write_manifest(opt, "sweep", file, std::move(eff));
  return result.failures == 0 ? kOk : kPartialSweepFailure;
}

int cmd_fixed_points(const Options& opt, std::ostream& out, std::ostream& /*err*/) {
  const auto file = ConfigFile::load(opt.config);
  const auto cfg = parse_fixed_points(file);
  const auto thermal = thermal_point(cfg.x);
  const auto couplings = couplings_from_ratios(cfg.r, cfg.k, cfg.Jt);
  const auto rep = classify(couplings, thermal);

  std::ostringstream text;
  text << fmt::format("r = {}, x = {}\n", format_summary(cfg.r), format_summary(cfg.x));
  text << "roots (c = f3/w2b):\n";
  for (const auto& fp : rep.fixed_points.roots) {
    text << fmt::format("  c = {:>12}  f3 = {:>12}  {}{}\n", format_summary(fp.c),
                        format_summary(fp.c * thermal.w2b), stability_name(fp.stability),
                        fp.multiplicity > 1 ? fmt::format(" (multiplicity {})", fp.multiplicity) : "");
  }
  std::ostringstream summary;
  print_report(summary, rep);
  text << summary.str();

  if (opt.out.empty()) {
    out << text.str();
  } else {
    std::ostringstream csv;
    write_phase_report_csv(csv, std::span<const PhaseReport>(&rep, 1));
    emit(opt, csv.str(), out);
    out << text.str();
    json eff;
    eff["r"] = cfg.r;
    eff["x"] = cfg.x;
    eff["Jt"] = cfg.Jt;
    eff["k"] = cfg.k;
    write_manifest(opt, "fixed-points", file, std::move(eff));
  }
  return kOk;
}

int cmd_collapse(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto file = ConfigFile::load(opt.config);
  const auto cfg = parse_collapse(file);
  const auto thermal = thermal_point(cfg.x);

  double stride = cfg.controls.sample_stride;
  if (!cfg.stride_set) {
    double shortest = INFINITY;
    for (double k : cfg.k_list) {
      const double t_max = cfg.t_max_set ? cfg.controls.t_max : default_cell_t_max(cfg.r, k, thermal, cfg.Jt);
      shortest = std::min(shortest, t_max);
    }
    stride = shortest / static_cast<double>(cfg.samples_per_run);
  }

  std::vector<Trajectory> runs;
  for (double k : cfg.k_list) {
    IntegratorControls c = cfg.controls;
    if (!cfg.t_max_set) c.t_max = default_cell_t_max(cfg.r, k, thermal, cfg.Jt);
    c.sample_stride = stride;
    runs.push_back(integrate(couplings_from_ratios(cfg.r, k, cfg.Jt), thermal, c));
  }
  const auto result = collapse(runs, cfg.grid_points);

  std::ostringstream csv;
  csv << "x";
  for (double k : result.k) csv << ",g_k" << format_summary(k);
  csv << '\n';
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    csv << format_data(result.grid[i]);
    for (const auto& row : result.g) csv << ',' << format_data(row[i]);
    csv << '\n';
  }
  emit(opt, csv.str(), out);

  std::ostream& summary = opt.out.empty() ? err : out;
  summary << "collapse_score: " << format_summary(result.score) << '\n'
          << "monotone: " << (result.monotone ? "yes" : "no") << '\n';

  json eff;
  eff["r"] = cfg.r;
  eff["x"] = cfg.x;
  eff["Jt"] = cfg.Jt;
  eff["k_list"] = cfg.k_list;
  eff["sample_stride"] = stride;
  eff["grid_points"] = cfg.grid_points;
  eff["collapse_score"] = result.score;
  write_manifest(opt, "collapse", file, std::move(eff));
  return kOk;
}

int cmd_selfcheck(std::ostream& out) {
  const auto results = run_selfcheck();
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  [" << r.detail << "]\n";
    all = all && r.passed;
  }
  if (!all) {
    out << "failed checks:\n";
    for (const auto& r : results) {
      if (!r.passed) out << "  - " << r.name << '\n';
    }
  }
  return all ? kOk : kSelfCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy accumulation kinetics: flat-band reduced Boltzmann flow"};
  app.require_subcommand(1);
  Options opt;

  auto add_io = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "key = value configuration file")->required();
    sub->add_option("--out", opt.out, "output data file (default: standard output)");
  };
  auto* simulate = app.add_subcommand("simulate", "integrate one trajectory, write time,f3,entropy");
  add_io(simulate);
  auto* sweep = app.add_subcommand("sweep", "plateau vs analytic saturation over an (r, k) grid");
  add_io(sweep);
  sweep->add_option("--jobs", opt.jobs, "worker threads (0 = all cores)");
  auto* fixed = app.add_subcommand("fixed-points", "roots, stability, Lyapunov exponent, saturation");
  add_io(fixed);
  auto* coll = app.add_subcommand("collapse", "scaling collapse over a list of Kt/Jt");
  add_io(coll);
  auto* self = app.add_subcommand("selfcheck", "run the embedded invariant suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    check_out_path(opt.out);
    if (simulate->parsed()) return cmd_simulate(opt, out, err);
    if (sweep->parsed()) return cmd_sweep(opt, out, err);
    if (fixed->parsed()) return cmd_fixed_points(opt, out, err);
    if (coll->parsed()) return cmd_collapse(opt, out, err);
    if (self->parsed()) return cmd_selfcheck(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << fmt::format(" (last good: t = {}, f3 = {})\n",
                                                            e.last_time(), e.last_f3());
    return kIntegrationError;
  } catch (const PreconditionError& e) {
    err << "analysis error: " << e.what() << '\n';
    return kIntegrationError;
  } catch (const InsufficientData& e) {
    err << "analysis error: " << e.what() << '\n';
    return kIntegrationError;
  }
  return kConfigError;
}

}  // namespace entacc::cli
