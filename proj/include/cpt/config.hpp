#pragma once

#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpt/analysis.hpp"

namespace cpt {

inline constexpr int kFormatVersion = 1;

struct ScanSpec
{
  double half_width_hz = 6000.0;
  int points = 241;
  double baseline_hz = 50e3;

  std::vector<double> grid() const { return detuning_grid(half_width_hz, points); }
};

struct StabilitySpec
{
  std::vector<double> fields_gauss{0.1, 0.2, 0.3};
  std::vector<double> intensities_mw_cm2{0.25, 0.5, 0.75, 1.0};
  double tau_s = 1.0;
};

struct DarkstateSpec
{
  HalfInt m = 0;
  HalfInt f_excited = 1;
};

struct ZeemanSpec
{
  double field_min_gauss = 0.0;
  double field_max_gauss = 1.0;
  int steps = 11;
};

struct OutputSpec
{
  std::string csv = "spectrum.csv"; ///< "-" writes to stdout
  std::string json = "-";
};

/// Everything a run depends on. Defaults reproduce the reference cell at 0.2 G.
struct RunConfig
{
  PhysicalConstants constants;
  AtomSpec atom;
  CellSpec cell;
  DriveConfig drive;
  double field_gauss = 0.2;
  ScanSpec scan;
  StabilitySpec stability;
  DarkstateSpec darkstate;
  ZeemanSpec zeeman;
  OutputSpec output;

  std::vector<std::string> overridden; ///< keys set by a file or flag, in order of first assignment

  void validate() const;
};

/// Config file or flag problem; the message carries the source and line when known.
struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ConfigKey
{
  std::string key;  ///< dotted name used in files
  std::string flag; ///< command-line long option without the leading dashes
  std::string unit;
  std::string description;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every recognised key in reference order.
const std::vector<ConfigKey>& config_keys();

/// Set one key from its textual value. Throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Read "key = value" lines; '#' starts a comment. `source` prefixes error messages.
void load_config(RunConfig& config, std::istream& in, std::string_view source = "<config>");
void load_config_file(RunConfig& config, const std::string& path);

/// Every key with its resolved value, formatted exactly as the file syntax accepts it.
std::vector<std::pair<std::string, std::string>> resolved_config(const RunConfig& config);

/// Markdown table of keys, flags, units, defaults and descriptions.
std::string config_reference();

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

} // namespace cpt
