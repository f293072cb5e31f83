#include "cpt/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cpt {

std::string format_number(double value)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) { return {}; }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text)
{
  text = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text)
{
  text = trim(text);
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text)
{
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") { return true; }
  if (text == "false" || text == "0" || text == "no" || text == "off") { return false; }
  throw ConfigError("expected true or false, got '" + std::string(text) + "'");
}

// Accepts "3/2", "-1/2", "1.5" or "2".
HalfInt parse_half_int(std::string_view text)
{
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    if (parse_int(text.substr(slash + 1)) != 2) { throw ConfigError("half-integer denominator must be 2"); }
    return HalfInt::from_twice(parse_int(text.substr(0, slash)));
  }
  const double twice = 2.0 * parse_double(text);
  if (twice != std::round(twice)) { throw ConfigError("'" + std::string(text) + "' is not a multiple of 1/2"); }
  return HalfInt::from_twice(static_cast<int>(twice));
}

std::vector<double> parse_list(std::string_view text)
{
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) { return out; }
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) { break; }
    start = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) { out += (i ? "," : "") + format_number(values[i]); }
  return out;
}

// Shortest decimal Hz value that maps back onto the stored angular frequency exactly, so
// 2 pi * 816.656e6 prints as 816656000 rather than 816655999.9999999.
std::string format_hz(double omega)
{
  for (int digits = 1; digits <= 17; ++digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, omega / kTwoPi, std::chars_format::general, digits);
    double hz = 0.0;
    std::from_chars(buf, res.ptr, hz);
    if (kTwoPi * hz == omega) { return format_number(hz); }
  }
  return format_number(omega / kTwoPi);
}

// Member accessors for keys stored in Hz but held as angular frequency.
template <typename Member>
ConfigKey hz_key(std::string key, std::string flag, std::string description, Member member)
{
  return {std::move(key), std::move(flag), "Hz", std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = kTwoPi * parse_double(v); },
          [member](const RunConfig& c) { return format_hz(member(c)); }};
}

template <typename Member>
ConfigKey number_key(std::string key, std::string flag, std::string unit, std::string description, Member member)
{
  return {std::move(key), std::move(flag), std::move(unit), std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_double(v); },
          [member](const RunConfig& c) { return format_number(member(c)); }};
}

template <typename Member>
ConfigKey int_key(std::string key, std::string flag, std::string description, Member member)
{
  return {std::move(key), std::move(flag), "", std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_int(v); },
          [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

template <typename Member>
ConfigKey half_key(std::string key, std::string flag, std::string description, Member member)
{
  return {std::move(key), std::move(flag), "", std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_half_int(v); },
          [member](const RunConfig& c) { return member(c).str(); }};
}

template <typename Member>
ConfigKey list_key(std::string key, std::string flag, std::string unit, std::string description, Member member)
{
  return {std::move(key), std::move(flag), std::move(unit), std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_list(v); },
          [member](const RunConfig& c) { return format_list(member(c)); }};
}

template <typename Member>
ConfigKey string_key(std::string key, std::string flag, std::string description, Member member)
{
  return {std::move(key), std::move(flag), "path", std::move(description),
          [member](RunConfig& c, std::string_view v) { member(c) = std::string(trim(v)); },
          [member](const RunConfig& c) { return member(c); }};
}

std::vector<ConfigKey> make_keys()
{
  std::vector<ConfigKey> k;
  // clang-format off
  k.push_back(number_key("constants.mu_b", "mu-b", "erg/G", "Bohr magneton", [](auto& c) -> auto& { return c.constants.mu_B; }));
  k.push_back(number_key("constants.mu_n", "mu-n", "erg/G", "nuclear magneton", [](auto& c) -> auto& { return c.constants.mu_N; }));
  k.push_back(number_key("constants.hbar", "hbar", "erg s", "reduced Planck constant", [](auto& c) -> auto& { return c.constants.hbar; }));
  k.push_back(number_key("constants.c", "speed-of-light", "cm/s", "speed of light", [](auto& c) -> auto& { return c.constants.c; }));

  k.push_back(half_key("atom.nuclear_spin", "nuclear-spin", "nuclear spin I", [](auto& c) -> auto& { return c.atom.nuclear_spin; }));
  k.push_back(hz_key("atom.hfs_ground_hz", "hfs-ground", "ground hyperfine splitting", [](auto& c) -> auto& { return c.atom.omega_hfs_ground; }));
  k.push_back(hz_key("atom.hfs_excited_hz", "hfs-excited", "excited (F_e=1 to F_e=2) hyperfine splitting", [](auto& c) -> auto& { return c.atom.omega_hfs_excited; }));
  k.push_back(number_key("atom.g_i", "g-i", "", "nuclear g factor; nuclear Zeeman energy is -g_i mu_N m H", [](auto& c) -> auto& { return c.atom.g_i; }));
  k.push_back(number_key("atom.g_j_ground", "g-j-ground", "", "ground-state electron g factor", [](auto& c) -> auto& { return c.atom.g_j_ground; }));
  k.push_back(number_key("atom.g_j_excited", "g-j-excited", "", "excited-state electron g factor", [](auto& c) -> auto& { return c.atom.g_j_excited; }));
  k.push_back(number_key("atom.reduced_dipole", "reduced-dipole", "statC cm", "reduced dipole element <J_g||d||J_e>", [](auto& c) -> auto& { return c.atom.reduced_dipole; }));
  k.push_back(hz_key("atom.gamma_e_hz", "gamma-e", "excited-state decay rate / 2 pi", [](auto& c) -> auto& { return c.atom.gamma_e; }));
  k.push_back(hz_key("atom.optical_linewidth_hz", "optical-linewidth", "optical coherence decay rate / 2 pi", [](auto& c) -> auto& { return c.atom.optical_linewidth; }));
  k.push_back(hz_key("atom.d1_frequency_hz", "d1-frequency", "D1 transition frequency", [](auto& c) -> auto& { return c.atom.omega_0; }));

  k.push_back(number_key("cell.radius_cm", "radius", "cm", "cell radius", [](auto& c) -> auto& { return c.cell.radius_cm; }));
  k.push_back(number_key("cell.length_cm", "length", "cm", "cell length", [](auto& c) -> auto& { return c.cell.length_cm; }));
  k.push_back(number_key("cell.density_cm3", "density", "1/cm^3", "alkali number density", [](auto& c) -> auto& { return c.cell.density_cm3; }));
  k.push_back(number_key("cell.temperature_k", "temperature", "K", "cell temperature (informational)", [](auto& c) -> auto& { return c.cell.temperature_k; }));
  k.push_back(number_key("cell.diffusion_cm2_s", "diffusion", "cm^2/s", "alkali diffusion coefficient", [](auto& c) -> auto& { return c.cell.diffusion_cm2_s; }));
  k.push_back(number_key("cell.buffer_pressure_torr", "buffer-pressure", "Torr", "buffer gas pressure (informational)", [](auto& c) -> auto& { return c.cell.buffer_pressure_torr; }));
  k.push_back(number_key("cell.gamma", "gamma", "1/s", "ground-state relaxation rate", [](auto& c) -> auto& { return c.cell.gamma_ground; }));
  k.push_back({"cell.quenching", "quenching", "bool", "excited population returns to the unpolarised ground mixture (false: radiative branching)",
               [](RunConfig& c, std::string_view v) { c.cell.quenching = parse_bool(v); },
               [](const RunConfig& c) { return std::string(c.cell.quenching ? "true" : "false"); }});
  k.push_back(int_key("cell.slabs", "slabs", "propagation slabs", [](auto& c) -> auto& { return c.cell.slabs; }));

  k.push_back(number_key("drive.u0_mw_cm2", "u0", "mW/cm^2", "total input intensity", [](auto& c) -> auto& { return c.drive.u0_mw_cm2; }));
  k.push_back(hz_key("drive.laser_detuning_hz", "laser-detuning", "laser detuning from F_g=1 -> F_e=1", [](auto& c) -> auto& { return c.drive.laser_detuning; }));
  k.push_back(hz_key("drive.raman_detuning_hz", "raman-detuning", "Raman detuning for darkstate", [](auto& c) -> auto& { return c.drive.raman_detuning; }));
  k.push_back(number_key("drive.sigma_minus_phase_rad", "phase", "rad", "extra phase on the upper-manifold sigma- amplitude", [](auto& c) -> auto& { return c.drive.sigma_minus_phase; }));
  k.push_back(number_key("drive.power_split", "power-split", "", "fraction of the intensity in the F_g=1 frequency", [](auto& c) -> auto& { return c.drive.power_split; }));

  k.push_back(number_key("field.gauss", "field-gauss", "G", "static magnetic field", [](auto& c) -> auto& { return c.field_gauss; }));

  k.push_back(number_key("scan.half_width_hz", "half-width", "Hz", "Raman scan half width", [](auto& c) -> auto& { return c.scan.half_width_hz; }));
  k.push_back(int_key("scan.points", "points", "Raman scan points", [](auto& c) -> auto& { return c.scan.points; }));
  k.push_back(number_key("scan.baseline_hz", "baseline", "Hz", "Raman detuning of the normalisation baseline", [](auto& c) -> auto& { return c.scan.baseline_hz; }));

  k.push_back(list_key("stability.fields_gauss", "fields", "G", "comma-separated field grid", [](auto& c) -> auto& { return c.stability.fields_gauss; }));
  k.push_back(list_key("stability.intensities_mw_cm2", "intensities", "mW/cm^2", "comma-separated intensity grid", [](auto& c) -> auto& { return c.stability.intensities_mw_cm2; }));
  k.push_back(number_key("stability.tau_s", "tau", "s", "integration time", [](auto& c) -> auto& { return c.stability.tau_s; }));

  k.push_back(half_key("darkstate.m", "m", "ground projection m of the loop", [](auto& c) -> auto& { return c.darkstate.m; }));
  k.push_back(half_key("darkstate.f_excited", "f-excited", "excited hyperfine level of the loop", [](auto& c) -> auto& { return c.darkstate.f_excited; }));

  k.push_back(number_key("zeeman.field_min_gauss", "field-min", "G", "first field of the table", [](auto& c) -> auto& { return c.zeeman.field_min_gauss; }));
  k.push_back(number_key("zeeman.field_max_gauss", "field-max", "G", "last field of the table", [](auto& c) -> auto& { return c.zeeman.field_max_gauss; }));
  k.push_back(int_key("zeeman.steps", "steps", "number of fields in the table", [](auto& c) -> auto& { return c.zeeman.steps; }));

  k.push_back(string_key("output.csv", "csv", "spectrum trace; - for stdout", [](auto& c) -> auto& { return c.output.csv; }));
  k.push_back(string_key("output.json", "json", "JSON report; - for stdout", [](auto& c) -> auto& { return c.output.json; }));
  // clang-format on
  return k;
}

} // namespace

const std::vector<ConfigKey>& config_keys()
{
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value)
{
  const auto& keys = config_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.key == key; });
  if (it == keys.end()) { throw ConfigError("unknown key '" + std::string(key) + "'"); }
  try {
    it->set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
  if (std::find(config.overridden.begin(), config.overridden.end(), it->key) == config.overridden.end()) {
    config.overridden.push_back(it->key);
  }
}

void load_config(RunConfig& config, std::istream& in, std::string_view source)
{
  std::string line;
  std::vector<std::string> seen;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto where = [&] { return std::string(source) + ":" + std::to_string(number) + ": "; };
    std::string_view text = line;
    text = trim(text.substr(0, text.find('#')));
    if (text.empty()) { continue; }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) { throw ConfigError(where() + "expected key = value"); }
    const std::string key(trim(text.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) { throw ConfigError(where() + "duplicate key '" + key + "'"); }
    seen.push_back(key);
    try {
      apply_setting(config, key, text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
}

void load_config_file(RunConfig& config, const std::string& path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError(path + ": cannot open config file"); }
  load_config(config, in, path);
}

std::vector<std::pair<std::string, std::string>> resolved_config(const RunConfig& config)
{
  std::vector<std::pair<std::string, std::string>> out;
  for (const ConfigKey& k : config_keys()) { out.emplace_back(k.key, k.get(config)); }
  return out;
}

std::string config_reference()
{
  const RunConfig defaults;
  std::ostringstream out;
  out << "| key | flag | unit | default | description |\n|---|---|---|---|---|\n";
  for (const ConfigKey& k : config_keys()) {
    out << "| `" << k.key << "` | `--" << k.flag << "` | " << k.unit << " | `" << k.get(defaults) << "` | "
        << k.description << " |\n";
  }
  return out.str();
}

void RunConfig::validate() const
{
  try {
    constants.validate();
    atom.validate();
    cell.validate();
    drive.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(std::abs(field_gauss) <= kMaxFieldGauss)) { throw ConfigError("field.gauss outside +-100 G"); }
  if (scan.points < 3 || !(scan.half_width_hz > 0.0)) { throw ConfigError("scan needs >= 3 points and a positive half width"); }
  if (!(stability.tau_s > 0.0)) { throw ConfigError("stability.tau_s must be positive"); }
  if (zeeman.steps < 1 || zeeman.field_max_gauss < zeeman.field_min_gauss) { throw ConfigError("zeeman range is empty"); }
}

} // namespace cpt
