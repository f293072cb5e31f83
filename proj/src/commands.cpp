#include "cpt/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace cpt {

using Json = nlohmann::ordered_json;

namespace {

Json header(const RunConfig& config, std::string_view command)
{
  Json j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  Json resolved = Json::object();
  for (const auto& [key, value] : resolved_config(config)) { resolved[key] = value; }
  j["config"] = resolved;
  j["overridden"] = config.overridden;
  return j;
}

double hz(double angular) { return angular / kTwoPi; }

Json complex_json(Cx z) { return Json{{"re", z.real() + 0.0}, {"im", z.imag() + 0.0}}; }

Json report_json(const PseudoresonanceReport& r)
{
  Json j;
  j["regime"] = to_string(r.regime);
  j["position_hz"] = hz(r.position);
  j["fwhm_hz"] = hz(r.fwhm);
  j["contrast"] = r.contrast;
  j["contrast_baseline"] = r.contrast_baseline;
  j["s2_per_rad_s2"] = r.s2;
  j["W_hz"] = hz(r.W);
  j["side_peaks_hz"] = {hz(r.side_peaks[0]), hz(r.side_peaks[1])};
  j["side_resonances_hz"] = {hz(r.side_resonances[0]), hz(r.side_resonances[1])};
  j["minimum_s"] = r.minimum_s;
  j["peak_s"] = r.peak_s;
  return j;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out)
{
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) { throw std::runtime_error("cannot open output file " + path); }
  file << text;
  if (!file) { throw std::runtime_error("failed writing " + path); }
}

} // namespace

SpectrumRun run_spectrum(const RunConfig& config)
{
  config.validate();
  const Atom atom(config.atom, config.field_gauss, config.constants);
  SpectrumRun run;
  run.trace = scan_spectrum(config.cell, atom, config.drive, config.scan.grid(), kTwoPi * config.scan.baseline_hz);
  run.theta = -std::log(run.trace.baseline_transmission);
  run.report = find_pseudoresonance(run.trace);
  if (run.report.regime == Regime::pseudoresonance && config.drive.u0_mw_cm2 > 0.0) {
    run.sigma_y = allan_sigma(StabilityInputs::from(config.cell, config.atom, config.drive.u0_mw_cm2, run.theta,
                                                    config.stability.tau_s, config.constants),
                              run.report.s2, run.report.W);
  }
  return run;
}

std::string trace_csv(const RunConfig& config, const SpectrumTrace& trace)
{
  std::string out = "# format_version=" + std::to_string(kFormatVersion) + "\n";
  for (const auto& [key, value] : resolved_config(config)) { out += "# " + key + "=" + value + "\n"; }
  out += "delta_hz,S\n";
  char line[96];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(line, sizeof line, "%.12g,%.12g\n", hz(trace.delta[i]), trace.s[i]);
    out += line;
  }
  return out;
}

std::string spectrum_json(const RunConfig& config, const SpectrumRun& run)
{
  Json j = header(config, "spectrum");
  j["baseline_transmission"] = run.trace.baseline_transmission;
  j["theta"] = run.theta;
  j["theta_in_optimal_range"] = theta_in_optimal_range(run.theta);
  j["report"] = report_json(run.report);
  j["sigma_y"] = run.sigma_y ? Json(*run.sigma_y) : Json(nullptr);
  return j.dump(2) + "\n";
}

std::string stability_json(const RunConfig& config, const StabilitySurface& surface)
{
  Json j = header(config, "stability");
  j["tau_s"] = config.stability.tau_s;
  Json rows = Json::array();
  for (const OperatingPoint& p : surface.rows) {
    Json row;
    row["field_gauss"] = p.field_gauss;
    row["u0_mw_cm2"] = p.u0_mw_cm2;
    row["theta"] = p.theta;
    row["theta_in_optimal_range"] = p.theta_in_range;
    row["regime"] = to_string(p.report.regime);
    row["s2_per_rad_s2"] = p.report.s2;
    row["W_hz"] = hz(p.report.W);
    row["fwhm_hz"] = hz(p.report.fwhm);
    row["contrast"] = p.report.contrast;
    row["sigma_y"] = p.sigma_y ? Json(*p.sigma_y) : Json(nullptr);
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (surface.best) {
    j["best_index"] = *surface.best;
    j["best"] = rows[*surface.best];
  } else {
    j["best_index"] = nullptr;
    j["best"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string darkstate_json(const RunConfig& config)
{
  config.validate();
  const AtomSpec& spec = config.atom;
  const HalfInt m = config.darkstate.m;
  const HalfInt fe = config.darkstate.f_excited;
  const std::vector<HalfInt> ground_f = hyperfine_levels(spec.j_ground, spec.nuclear_spin);
  const std::vector<HalfInt> excited_f = hyperfine_levels(spec.j_excited, spec.nuclear_spin);
  if (std::find(excited_f.begin(), excited_f.end(), fe) == excited_f.end()) {
    throw ConfigError("darkstate.f_excited " + fe.str() + " is not an excited hyperfine level");
  }

  // Tune the laser onto the requested excited level.
  DriveConfig drive = config.drive;
  drive.laser_detuning += excited_hyperfine_offset(spec, fe) - excited_hyperfine_offset(spec, excited_f.front());
  const Atom atom(spec, config.field_gauss, config.constants);
  const std::vector<FieldComponent> fields = make_fields(spec, drive, config.constants);

  const auto need = [&](Manifold manifold, HalfInt F, HalfInt mm) {
    const int i = atom.index(manifold, F, mm);
    if (i < 0) {
      throw LoopAbsent("double-Lambda loop absent: no state |F=" + F.str() + ", m=" + mm.str() + "> in the " +
                       (manifold == Manifold::ground ? "ground" : "excited") + " manifold");
    }
    return i;
  };
  const HalfInt f_lo = ground_f.front(), f_hi = ground_f.back();
  const int g1 = need(Manifold::ground, f_lo, m);
  const int g2 = need(Manifold::ground, f_hi, m);
  const int e_plus = need(Manifold::excited, fe, m + 1);
  const int e_minus = need(Manifold::excited, fe, m - 1);

  const LoopAmplitudes amplitudes{fields[0].amplitude, fields[1].amplitude, fields[2].amplitude, fields[3].amplitude};
  const Cx zeta = ratio_zeta(spec, m, fe, 0.0, 0.0, amplitudes);
  const SignedSqrtRational angular = exact_dipole_zeta(spec, m, fe);

  const Eigen::Vector2cd cpt_plus = cpt_state(coupling(atom, fields, g1, e_plus), coupling(atom, fields, g2, e_plus));
  const Eigen::Vector2cd cpt_minus = cpt_state(coupling(atom, fields, g1, e_minus), coupling(atom, fields, g2, e_minus));
  const double overlap = std::abs(cpt_plus.dot(cpt_minus));

  const auto scheme_json = [&](int a, int b) {
    const LambdaScheme s = classify_scheme(atom, fields, a, b);
    Json excited = Json::array();
    for (const Level& l : s.excited) { excited.push_back(l.label()); }
    return std::pair{s.kind, Json{{"g1", s.g1.label()}, {"g2", s.g2.label()}, {"kind", to_string(s.kind)}, {"excited", excited}}};
  };
  const auto [loop_kind, loop] = scheme_json(g1, g2);
  Json side = Json::object();
  if (f_lo == HalfInt(1)) {
    side["a"] = scheme_json(need(Manifold::ground, f_lo, 1), need(Manifold::ground, f_hi, -1)).second;
    side["b"] = scheme_json(need(Manifold::ground, f_lo, -1), need(Manifold::ground, f_hi, 1)).second;
  }

  constexpr double kZetaTolerance = 1e-9;
  const bool capable = loop_kind == SchemeKind::lambda ||
                       (loop_kind == SchemeKind::double_lambda && std::abs(zeta - 1.0) < kZetaTolerance);

  const auto state_json = [&](const Eigen::Vector2cd& v) {
    return Json{{"g1", atom.levels()[static_cast<std::size_t>(g1)].label()},
                {"g2", atom.levels()[static_cast<std::size_t>(g2)].label()},
                {"c1", complex_json(v(0))},
                {"c2", complex_json(v(1))}};
  };

  Json j = header(config, "darkstate");
  j["m"] = m.str();
  j["f_excited"] = fe.str();
  j["zeta"] = complex_json(zeta);
  j["zeta_angular_exact"] = Json{{"sign", angular.sign}, {"square", angular.square.str()}};
  j["cpt_plus"] = state_json(cpt_plus);
  j["cpt_minus"] = state_json(cpt_minus);
  j["cpt_overlap"] = overlap;
  j["loop"] = loop;
  j["side_pairs"] = side;
  j["cpt_capable"] = capable;
  return j.dump(2) + "\n";
}

std::string zeeman_json(const RunConfig& config)
{
  config.validate();
  const ZeemanSpec& z = config.zeeman;
  Json rows = Json::array();
  for (int i = 0; i < z.steps; ++i) {
    const double h = z.steps == 1 ? z.field_min_gauss
                                  : z.field_min_gauss + (z.field_max_gauss - z.field_min_gauss) * i / (z.steps - 1);
    const auto& a = config.atom;
    const auto& k = config.constants;
    Json row;
    row["field_gauss"] = h;
    row["pair_a_hz"] = hz(pair_splitting(a, h, SidePair::a, k));
    row["pair_b_hz"] = hz(pair_splitting(a, h, SidePair::b, k));
    row["pair_a_breit_rabi_hz"] = hz(breit_rabi_pair_splitting(a, h, SidePair::a, k));
    row["pair_b_breit_rabi_hz"] = hz(breit_rabi_pair_splitting(a, h, SidePair::b, k));
    row["clock_hz"] = hz(clock_splitting(a, h, k));
    Json levels = Json::array();
    for (const Level& l : build_levels(a, h, k)) {
      levels.push_back(Json{{"manifold", l.ground() ? "ground" : "excited"},
                            {"F", l.F.str()},
                            {"m", l.m.str()},
                            {"energy_hz", hz(l.energy)}});
    }
    row["levels"] = levels;
    rows.push_back(row);
  }
  Json j = header(config, "zeeman");
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

int run_command(std::string_view command, const RunConfig& config, std::ostream& out)
{
  config.validate();
  if (command == "spectrum") {
    const SpectrumRun run = run_spectrum(config);
    write_output(config.output.csv, trace_csv(config, run.trace), out);
    write_output(config.output.json, spectrum_json(config, run), out);
  } else if (command == "stability") {
    const StabilitySpec& s = config.stability;
    if (s.fields_gauss.empty() || s.intensities_mw_cm2.empty()) {
      throw ConfigError("stability needs non-empty stability.fields_gauss and stability.intensities_mw_cm2");
    }
    StabilityScan scan{s.fields_gauss, s.intensities_mw_cm2, config.scan.grid(), s.tau_s, kTwoPi * config.scan.baseline_hz};
    const StabilitySurface surface =
        optimize_operating_point(config.cell, config.atom, config.drive, scan, config.constants);
    write_output(config.output.json, stability_json(config, surface), out);
  } else if (command == "darkstate") {
    write_output(config.output.json, darkstate_json(config), out);
  } else if (command == "zeeman") {
    write_output(config.output.json, zeeman_json(config), out);
  } else {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  return 0;
}

} // namespace cpt
