#include "entacc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "entacc/errors.hpp"

namespace entacc {

namespace pt = boost::property_tree;

namespace {

const ConfigFile::Section kEmpty;

double parse_number(const std::string& text, const std::string& where) {
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  if (first == std::string::npos) throw ConfigError(fmt::format("{}: empty value", where));
  const char* begin = text.data() + first;
  const char* end = text.data() + last + 1;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, text));
  }
  return v;
}

// Typed, validated access to one section; rejects unknown keys.
class SectionReader {
public:
  SectionReader(const ConfigFile& file, std::string name, std::set<std::string> allowed)
      : name_(std::move(name)), entries_(file.section(name_)) {
    if (!file.has_section(name_)) {
      throw ConfigError(fmt::format("missing [{}] section", name_));
    }
    for (const auto& [key, value] : entries_) {
      if (!allowed.contains(key)) {
        throw ConfigError(fmt::format("[{}]: unknown key '{}'", name_, key));
      }
    }
  }

  std::optional<double> number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return parse_number(it->second, where(key));
  }

  double required(const std::string& key) const {
    const auto v = number(key);
    if (!v) throw ConfigError(fmt::format("[{}]: missing required key '{}'", name_, key));
    return *v;
  }

  double number_or(const std::string& key, double fallback) const {
    return number(key).value_or(fallback);
  }

  std::optional<std::vector<double>> list(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    try {
      return parse_number_list(it->second);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}: {}", where(key), e.what()));
    }
  }

  std::size_t count_or(const std::string& key, std::size_t fallback) const {
    const auto v = number(key);
    if (!v) return fallback;
    if (*v < 1.0 || std::floor(*v) != *v) {
      throw ConfigError(fmt::format("{}: expected a positive integer", where(key)));
    }
    return static_cast<std::size_t>(*v);
  }

private:
  std::string where(const std::string& key) const { return fmt::format("[{}] {}", name_, key); }

  std::string name_;
  const ConfigFile::Section& entries_;
};

const std::set<std::string> kControlKeys{"rel_tol",  "abs_tol",     "max_step",   "t_max",
                                         "sample_stride", "plateau_tol", "plateau_window"};

std::set<std::string> with_controls(std::set<std::string> keys) {
  keys.insert(kControlKeys.begin(), kControlKeys.end());
  return keys;
}

IntegratorControls read_controls(const SectionReader& s) {
  IntegratorControls c;
  c.rel_tol = s.number_or("rel_tol", c.rel_tol);
  c.abs_tol = s.number_or("abs_tol", c.abs_tol);
  c.max_step = s.number_or("max_step", c.max_step);
  c.t_max = s.number_or("t_max", c.t_max);
  c.sample_stride = s.number_or("sample_stride", c.sample_stride);
  c.plateau_tol = s.number_or("plateau_tol", c.plateau_tol);
  c.plateau_window = s.number("plateau_window");
  return c;
}

// Rewraps module validation failures as configuration errors.
template <class F>
auto checked(const char* section, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw ConfigError(fmt::format("[{}]: {}", section, e.what()));
  }
}

}  // namespace

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ConfigFile ConfigFile::parse(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }
  ConfigFile file;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      throw ConfigError(fmt::format("key '{}' outside any [section]", name));
    }
    auto& section = file.sections_[name];
    for (const auto& [key, value] : node) section[key] = value.data();
  }
  return file;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.contains(section);
}

const ConfigFile::Section& ConfigFile::section(const std::string& section) const {
  const auto it = sections_.find(section);
  return it == sections_.end() ? kEmpty : it->second;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_number(token, "list"));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

SimulateConfig parse_simulate(const ConfigFile& file) {
  const SectionReader s(file, "simulate", with_controls({"r", "k", "x", "Jt", "f3_init"}));
  SimulateConfig cfg;
  cfg.r = s.required("r");
  cfg.k = s.number_or("k", 0.0);
  cfg.x = s.required("x");
  cfg.Jt = s.number_or("Jt", 1.0);
  cfg.f3_init = s.number("f3_init");
  cfg.controls = read_controls(s);
  checked("simulate", [&] {
    const auto thermal = thermal_point(cfg.x);
    couplings_from_ratios(cfg.r, cfg.k, cfg.Jt);
    if (!s.number("t_max")) cfg.controls.t_max = default_cell_t_max(cfg.r, cfg.k, thermal, cfg.Jt);
    if (!s.number("sample_stride")) cfg.controls.sample_stride = cfg.controls.t_max / 20000.0;
    validate(cfg.controls);
    return 0;
  });
  return cfg;
}

SweepConfig parse_sweep(const ConfigFile& file) {
  const SectionReader s(file, "sweep",
                        with_controls({"r_grid", "k_grid", "x", "Jt", "samples_per_cell"}));
  SweepConfig cfg;
  const auto r_grid = s.list("r_grid");
  const auto k_grid = s.list("k_grid");
  if (!r_grid) throw ConfigError("[sweep]: missing required key 'r_grid'");
  if (!k_grid) throw ConfigError("[sweep]: missing required key 'k_grid'");
  cfg.r_grid = *r_grid;
  cfg.k_grid = *k_grid;
  cfg.x = s.number_or("x", cfg.x);
  cfg.Jt = s.number_or("Jt", cfg.Jt);
  cfg.controls = read_controls(s);
  cfg.t_max = s.number("t_max");
  cfg.sample_stride = s.number("sample_stride");
  cfg.samples_per_cell = s.count_or("samples_per_cell", cfg.samples_per_cell);
  checked("sweep", [&] {
    validate(cfg);
    IntegratorControls probe = cfg.controls;
    probe.t_max = cfg.t_max.value_or(1.0);
    probe.sample_stride = cfg.sample_stride.value_or(probe.t_max / 10.0);
    validate(probe);
    return 0;
  });
  return cfg;
}

FixedPointsConfig parse_fixed_points(const ConfigFile& file) {
  const SectionReader s(file, "fixed-points", {"r", "x", "Jt", "k"});
  FixedPointsConfig cfg;
  cfg.r = s.required("r");
  cfg.x = s.required("x");
  cfg.Jt = s.number_or("Jt", 1.0);
  cfg.k = s.number_or("k", 0.0);
  checked("fixed-points", [&] {
    thermal_point(cfg.x);
    couplings_from_ratios(cfg.r, cfg.k, cfg.Jt);
    return 0;
  });
  return cfg;
}

CollapseConfig parse_collapse(const ConfigFile& file) {
  const SectionReader s(file, "collapse",
                        with_controls({"r", "x", "Jt", "k_list", "samples_per_run", "grid_points"}));
  CollapseConfig cfg;
  cfg.r = s.required("r");
  cfg.x = s.required("x");
  cfg.Jt = s.number_or("Jt", 1.0);
  const auto ks = s.list("k_list");
  if (!ks) throw ConfigError("[collapse]: missing required key 'k_list'");
  cfg.k_list = *ks;
  cfg.controls = read_controls(s);
  cfg.t_max_set = s.number("t_max").has_value();
  cfg.stride_set = s.number("sample_stride").has_value();
  cfg.samples_per_run = s.count_or("samples_per_run", cfg.samples_per_run);
  cfg.grid_points = s.count_or("grid_points", cfg.grid_points);
  checked("collapse", [&] {
    thermal_point(cfg.x);
    for (double k : cfg.k_list) couplings_from_ratios(cfg.r, k, cfg.Jt);
    validate(cfg.controls);
    return 0;
  });
  return cfg;
}

}  // namespace entacc
