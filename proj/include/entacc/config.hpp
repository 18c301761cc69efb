#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entacc/kinetics.hpp"
#include "entacc/sweep.hpp"

namespace entacc {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented `key = value` file with one `[section]` per command.
/// Lines starting with `#` or `;` are comments.
class ConfigFile {
public:
  using Section = std::map<std::string, std::string>;

  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile parse(const std::string& text);

  bool has_section(const std::string& section) const;
  /// Entries of a section; empty if the section is absent.
  const Section& section(const std::string& section) const;
  const std::map<std::string, Section>& sections() const { return sections_; }

private:
  std::map<std::string, Section> sections_;
};

struct SimulateConfig {
  double r = 0.0;
  double k = 0.0;
  double x = 0.0;
  double Jt = 1.0;
  std::optional<double> f3_init;
  IntegratorControls controls;
};

struct FixedPointsConfig {
  double r = 0.0;
  double x = 0.0;
  double Jt = 1.0;
  double k = 0.0;
};

struct CollapseConfig {
  double r = 0.0;
  double x = 0.0;
  double Jt = 1.0;
  std::vector<double> k_list;
  IntegratorControls controls;  ///< t_max / stride unset in file => per-run defaults
  bool t_max_set = false;
  bool stride_set = false;
  std::size_t samples_per_run = 20000;
  std::size_t grid_points = 200;
};

SimulateConfig parse_simulate(const ConfigFile& file);
SweepConfig parse_sweep(const ConfigFile& file);
FixedPointsConfig parse_fixed_points(const ConfigFile& file);
CollapseConfig parse_collapse(const ConfigFile& file);

/// Comma- or whitespace-separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace entacc
