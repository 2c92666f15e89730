#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "afcsim/medium.hpp"

namespace afcsim::cli {

struct GridSection {
  double span = 64.0;  // MHz
  std::uint64_t points = 65536;
  bool operator==(const GridSection&) const = default;
};

struct CombSection {
  double tooth_spacing = 0.5;
  double finesse = 5.8;
  ToothShape shape = ToothShape::gaussian;
  double peak_od = 2.18;
  double effective_depth = 0.0;  // > 0 overrides peak_od
  double background_od = 0.0;
  double bandwidth = 12.0;
  double center_offset = 0.0;
  double pit_width = 18.0;
  double line_od = 0.0;
  bool operator==(const CombSection&) const = default;
};

struct CavitySection {
  bool enabled = true;
  double r_in = 0.4;
  double r_out = 0.97;
  double loss = 0.0;
  double round_trip_time = 0.001;
  double resonance_offset = 0.0;
  bool operator==(const CavitySection&) const = default;
};

struct PulseSection {
  double fwhm = 1.0;
  double center = 4.0;
  double mu_in = 0.33;
  double window = 2.0;
  bool operator==(const PulseSection&) const = default;
};

struct QubitSection {
  double bin_separation = 1.0;
  double pulse_fwhm = 0.51;
  double mu_in = 0.25;
  double early_time = 3.0;
  double window = 1.0;
  std::vector<double> phases_deg{0.0, 45.0, 90.0, 135.0};
  std::uint64_t shifts_per_period = 8;
  double filter_tooth_spacing = 1.0;
  double filter_finesse = 8.0;
  ToothShape filter_shape = ToothShape::square;
  double filter_bandwidth = 16.0;
  double filter_pit_width = 18.0;
  double pole_noise = 0.0;
  bool operator==(const QubitSection&) const = default;
};

struct ScanSection {
  std::vector<double> storage_times{2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0};
  double t2_eff = 0.0;
  bool match_depth = true;
  std::vector<double> pulse_fwhms{0.12, 0.16, 0.2, 0.25, 0.33, 0.5, 0.75, 1.0};
  double reference_fwhm = 1.0;
  bool operator==(const ScanSection&) const = default;
};

enum class McSource { storage, scan_storage_time, scan_bandwidth, qubit_fringe };

struct MonteCarloSection {
  McSource source = McSource::storage;
  std::uint64_t pulses_per_cycle = 1000;
  double cycle_rate = 1.0;
  double duration = 120.0;
  double dark_rate = 25.0;
  double reference_reflectivity = 0.4;
  double detector_efficiency = 1.0;
  double bin_width = 0.05;
  std::uint64_t fringe_trials = 240000;
  std::uint64_t seed = 1;
  bool operator==(const MonteCarloSection&) const = default;
};

struct OutputSection {
  std::string directory = "afcsim_out";
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  GridSection grid;
  CombSection comb;
  CavitySection cavity;
  PulseSection pulse;
  QubitSection qubit;
  ScanSection scan;
  MonteCarloSection montecarlo;
  OutputSection output;
  bool operator==(const RunConfig&) const = default;
};

/// Malformed or out-of-range configuration. line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Parses `[section]` / `key = value` text with `#` comments. Keys are case
/// insensitive; unknown sections or keys, duplicates and out-of-range values
/// are errors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Every section and key with its value, preceded by a comment describing it.
/// parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

/// Cross-field checks that single keys cannot express.
void validate_config(const RunConfig& cfg);

std::string_view to_string(ToothShape shape);
std::string_view to_string(McSource source);

}  // namespace afcsim::cli
