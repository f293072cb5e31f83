#include <doctest.h>

#include <memory>
#include <set>
#include <sstream>

#include "cpt/config.hpp"

using namespace cpt;

namespace {

std::string as_file(const RunConfig& c)
{
  std::string out;
  for (const auto& [k, v] : resolved_config(c)) { out += k + " = " + v + "\n"; }
  return out;
}

RunConfig load(const std::string& text)
{
  RunConfig c;
  std::istringstream in(text);
  load_config(c, in, "test.cfg");
  return c;
}

std::string error_of(const std::string& text)
{
  try {
    load(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("keys and flags are unique")
{
  std::set<std::string> keys, flags;
  for (const ConfigKey& k : config_keys()) {
    CHECK(keys.insert(k.key).second);
    CHECK(flags.insert(k.flag).second);
    CHECK(k.key.find('.') != std::string::npos);
    CHECK_FALSE(k.description.empty());
  }
  CHECK(keys.count("field.gauss") == 1);
  CHECK(flags.count("field-gauss") == 1);
  CHECK(flags.count("gamma") == 1);
}

TEST_CASE("resolved configuration round-trips")
{
  const RunConfig defaults;
  const std::string text = as_file(defaults);
  const RunConfig reloaded = load(text);
  CHECK(as_file(reloaded) == text);
  CHECK(reloaded.atom.omega_hfs_ground == defaults.atom.omega_hfs_ground);
  CHECK(reloaded.atom.optical_linewidth == defaults.atom.optical_linewidth);
  CHECK(reloaded.cell.density_cm3 == defaults.cell.density_cm3);
  CHECK(reloaded.stability.fields_gauss == defaults.stability.fields_gauss);
  CHECK(reloaded.overridden.size() == config_keys().size());
}

TEST_CASE("values are parsed into the right fields")
{
  const RunConfig c = load("# comment line\n"
                           "\n"
                           "field.gauss = 0.35   # trailing comment\n"
                           "cell.quenching = false\n"
                           "atom.hfs_ground_hz = 1000\n"
                           "stability.intensities_mw_cm2 = 0.1, 0.2,0.4\n"
                           "darkstate.m = -1/2\n"
                           "darkstate.f_excited = 2\n"
                           "cell.slabs = 12\n");
  CHECK(c.field_gauss == 0.35);
  CHECK_FALSE(c.cell.quenching);
  CHECK(c.atom.omega_hfs_ground == doctest::Approx(kTwoPi * 1000.0).epsilon(1e-15));
  CHECK(c.stability.intensities_mw_cm2 == std::vector<double>{0.1, 0.2, 0.4});
  CHECK(c.darkstate.m == half(-1));
  CHECK(c.darkstate.f_excited == HalfInt(2));
  CHECK(c.cell.slabs == 12);
  CHECK(c.overridden ==
        std::vector<std::string>{"field.gauss", "cell.quenching", "atom.hfs_ground_hz", "stability.intensities_mw_cm2",
                                 "darkstate.m", "darkstate.f_excited", "cell.slabs"});
}

TEST_CASE("later settings override earlier ones")
{
  RunConfig c = load("field.gauss = 0.1\n");
  apply_setting(c, "field.gauss", "0.3");
  CHECK(c.field_gauss == 0.3);
  CHECK(c.overridden == std::vector<std::string>{"field.gauss"});
}

TEST_CASE("errors name the source line")
{
  CHECK(error_of("field.gauss = 0.1\nbogus.key = 1\n").find("test.cfg:2:") == 0);
  CHECK(error_of("bogus.key = 1\n").find("unknown key 'bogus.key'") != std::string::npos);
  CHECK(error_of("field.gauss = 0.1\nfield.gauss = 0.2\n").find("test.cfg:2: duplicate key") == 0);
  CHECK(error_of("field.gauss 0.1\n").find("expected key = value") != std::string::npos);
  CHECK(error_of("field.gauss = abc\n").find("expected a number") != std::string::npos);
  CHECK(error_of("field.gauss = 0.1x\n").find("expected a number") != std::string::npos);
  CHECK(error_of("cell.slabs = 2.5\n").find("expected an integer") != std::string::npos);
  CHECK(error_of("cell.quenching = maybe\n").find("expected true or false") != std::string::npos);
  CHECK(error_of("darkstate.m = 1/3\n").find("denominator") != std::string::npos);
  CHECK(error_of("darkstate.m = 0.3\n").find("multiple of 1/2") != std::string::npos);
  CHECK(error_of("field.gauss = nan\n").find("expected a number") != std::string::npos);
  CHECK(error_of("stability.fields_gauss = 0.1,,0.2\n").find("expected a number") != std::string::npos);
  CHECK_THROWS_AS(load_config_file(*std::make_unique<RunConfig>(), "/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("validation")
{
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.field_gauss = 150.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.cell.slabs = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.zeeman.field_max_gauss = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.drive.power_split = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("number formatting round-trips")
{
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(241.0) == "241");
  CHECK(format_number(-2.5e-17) == "-2.5e-17");
  for (double v : {1.0 / 3.0, 6.834682610904e9, 1.0758e-17, -0.0}) { CHECK(std::stod(format_number(v)) == v); }
}

TEST_CASE("reference table lists every key with its default")
{
  const std::string table = config_reference();
  for (const ConfigKey& k : config_keys()) {
    CHECK(table.find("`" + k.key + "`") != std::string::npos);
    CHECK(table.find("`--" + k.flag + "`") != std::string::npos);
  }
  CHECK(table.find("`6834682610.904`") != std::string::npos);
}
