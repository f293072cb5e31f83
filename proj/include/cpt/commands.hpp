#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "cpt/config.hpp"

namespace cpt {

struct SpectrumRun
{
  SpectrumTrace trace;
  PseudoresonanceReport report;
  double theta = 0.0;
  std::optional<double> sigma_y;
};

SpectrumRun run_spectrum(const RunConfig& config);

/// Trace as CSV: '#' lines carrying the format version and resolved config, then delta_hz,S.
std::string trace_csv(const RunConfig& config, const SpectrumTrace& trace);

std::string spectrum_json(const RunConfig& config, const SpectrumRun& run);
std::string stability_json(const RunConfig& config, const StabilitySurface& surface);
std::string darkstate_json(const RunConfig& config);
std::string zeeman_json(const RunConfig& config);

/// Runs one subcommand and writes its outputs to the configured paths ("-" goes to `out`).
/// Returns the process exit status.
int run_command(std::string_view command, const RunConfig& config, std::ostream& out);

} // namespace cpt
