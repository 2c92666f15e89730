#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "afcsim/error.hpp"

namespace afcsim::cli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Field {
  std::string section;
  std::string key;
  std::string doc;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& name) {
  const auto s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(0, name + ": '" + s + "' is not a finite number");
  return v;
}

std::uint64_t parse_uint(std::string_view text, const std::string& name) {
  const auto s = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(0, name + ": '" + s + "' is not a non-negative integer");
  return v;
}

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    const bool above = lo_open ? v > lo : v >= lo;
    const bool below = hi_open ? v < hi : v <= hi;
    return above && below;
  }
  std::string describe() const {
    return std::string(lo_open ? "(" : "[") + format_double(lo) + ", " + format_double(hi) +
           (hi_open ? ")" : "]");
  }
};

void check_range(double v, const Range& r, const std::string& name) {
  if (!r.contains(v))
    throw ConfigError(0, "range violation: " + name + " = " + format_double(v) + " outside " +
                             r.describe());
}

template <class Get>
Field number(std::string section, std::string key, std::string doc, Range range, Get get) {
  const std::string name = section + "." + key;
  return {section, key, std::move(doc),
          [get](const RunConfig& c) { return format_double(get(const_cast<RunConfig&>(c))); },
          [get, range, name](RunConfig& c, std::string_view v) {
            const double x = parse_double(v, name);
            check_range(x, range, name);
            get(c) = x;
          }};
}

template <class Get>
Field integer(std::string section, std::string key, std::string doc, std::uint64_t lo, Get get) {
  const std::string name = section + "." + key;
  return {section, key, std::move(doc),
          [get](const RunConfig& c) { return std::to_string(get(const_cast<RunConfig&>(c))); },
          [get, lo, name](RunConfig& c, std::string_view v) {
            const auto x = parse_uint(v, name);
            if (x < lo)
              throw ConfigError(0, "range violation: " + name + " = " + std::to_string(x) +
                                       " must be >= " + std::to_string(lo));
            get(c) = x;
          }};
}

template <class Get>
Field boolean(std::string section, std::string key, std::string doc, Get get) {
  const std::string name = section + "." + key;
  return {section, key, std::move(doc),
          [get](const RunConfig& c) {
            return std::string(get(const_cast<RunConfig&>(c)) ? "true" : "false");
          },
          [get, name](RunConfig& c, std::string_view v) {
            const auto s = lower(trim(v));
            if (s == "true") get(c) = true;
            else if (s == "false") get(c) = false;
            else throw ConfigError(0, name + ": expected true or false, got '" + s + "'");
          }};
}

template <class Get>
Field shape(std::string section, std::string key, std::string doc, Get get) {
  const std::string name = section + "." + key;
  return {section, key, std::move(doc),
          [get](const RunConfig& c) { return std::string(to_string(get(const_cast<RunConfig&>(c)))); },
          [get, name](RunConfig& c, std::string_view v) {
            const auto s = lower(trim(v));
            if (s == "square") get(c) = ToothShape::square;
            else if (s == "gaussian") get(c) = ToothShape::gaussian;
            else throw ConfigError(0, name + ": expected square or gaussian, got '" + s + "'");
          }};
}

template <class Get>
Field list(std::string section, std::string key, std::string doc, Range range, Get get) {
  const std::string name = section + "." + key;
  return {section, key, std::move(doc),
          [get](const RunConfig& c) {
            std::string out;
            for (double v : get(const_cast<RunConfig&>(c))) {
              if (!out.empty()) out += ", ";
              out += format_double(v);
            }
            return out;
          },
          [get, range, name](RunConfig& c, std::string_view v) {
            std::vector<double> out;
            std::size_t pos = 0;
            const std::string s(v);
            while (pos <= s.size()) {
              const auto comma = s.find(',', pos);
              const auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
              const double x = parse_double(item, name);
              check_range(x, range, name);
              out.push_back(x);
              if (comma == std::string::npos) break;
              pos = comma + 1;
            }
            get(c) = std::move(out);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    const Range positive{0.0, kInf, true, false};
    const Range nonneg{0.0, kInf, false, false};
    const Range unit{0.0, 1.0, false, false};
    const Range any{};
    std::vector<Field> f;
    f.push_back(number("grid", "span", "frequency span, MHz (>= 4x comb bandwidth)", positive,
                       [](RunConfig& c) -> double& { return c.grid.span; }));
    f.push_back(integer("grid", "points", "number of samples, a power of two", 2,
                        [](RunConfig& c) -> std::uint64_t& { return c.grid.points; }));

    f.push_back(number("comb", "tooth_spacing", "tooth spacing, MHz; storage time is 1/spacing",
                       positive, [](RunConfig& c) -> double& { return c.comb.tooth_spacing; }));
    f.push_back(number("comb", "finesse", "spacing / tooth width", Range{1.0, kInf},
                       [](RunConfig& c) -> double& { return c.comb.finesse; }));
    f.push_back(shape("comb", "shape", "tooth shape: square or gaussian",
                      [](RunConfig& c) -> ToothShape& { return c.comb.shape; }));
    f.push_back(number("comb", "peak_od", "peak optical depth of a tooth", nonneg,
                       [](RunConfig& c) -> double& { return c.comb.peak_od; }));
    f.push_back(number("comb", "effective_depth",
                       "comb-averaged OD; when > 0 it sets peak_od (0 keeps peak_od)", nonneg,
                       [](RunConfig& c) -> double& { return c.comb.effective_depth; }));
    f.push_back(number("comb", "background_od", "OD added under the comb band", nonneg,
                       [](RunConfig& c) -> double& { return c.comb.background_od; }));
    f.push_back(number("comb", "bandwidth", "comb bandwidth, MHz", positive,
                       [](RunConfig& c) -> double& { return c.comb.bandwidth; }));
    f.push_back(number("comb", "center_offset", "comb centre relative to the carrier, MHz", any,
                       [](RunConfig& c) -> double& { return c.comb.center_offset; }));
    f.push_back(number("comb", "pit_width", "transparent spectral pit width, MHz", positive,
                       [](RunConfig& c) -> double& { return c.comb.pit_width; }));
    f.push_back(number("comb", "line_od", "inhomogeneous line OD outside the pit", nonneg,
                       [](RunConfig& c) -> double& { return c.comb.line_od; }));

    f.push_back(boolean("cavity", "enabled", "false stores in the bare crystal (single pass)",
                        [](RunConfig& c) -> bool& { return c.cavity.enabled; }));
    f.push_back(number("cavity", "r_in", "input mirror intensity reflectivity", unit,
                       [](RunConfig& c) -> double& { return c.cavity.r_in; }));
    f.push_back(number("cavity", "r_out", "back mirror intensity reflectivity", unit,
                       [](RunConfig& c) -> double& { return c.cavity.r_out; }));
    f.push_back(number("cavity", "loss", "round-trip intensity loss", Range{0.0, 1.0, false, true},
                       [](RunConfig& c) -> double& { return c.cavity.loss; }));
    f.push_back(number("cavity", "round_trip_time", "empty-cavity round trip, us", positive,
                       [](RunConfig& c) -> double& { return c.cavity.round_trip_time; }));
    f.push_back(number("cavity", "resonance_offset", "bare resonance relative to the carrier, MHz",
                       any, [](RunConfig& c) -> double& { return c.cavity.resonance_offset; }));

    f.push_back(number("pulse", "fwhm", "input pulse intensity FWHM, us", positive,
                       [](RunConfig& c) -> double& { return c.pulse.fwhm; }));
    f.push_back(number("pulse", "center", "input pulse centre, us", positive,
                       [](RunConfig& c) -> double& { return c.pulse.center; }));
    f.push_back(number("pulse", "mu_in", "mean photon number per pulse", nonneg,
                       [](RunConfig& c) -> double& { return c.pulse.mu_in; }));
    f.push_back(number("pulse", "window", "detection window for input and echo, us", positive,
                       [](RunConfig& c) -> double& { return c.pulse.window; }));

    f.push_back(number("qubit", "bin_separation", "time-bin separation, us", positive,
                       [](RunConfig& c) -> double& { return c.qubit.bin_separation; }));
    f.push_back(number("qubit", "pulse_fwhm", "FWHM of each bin, us", positive,
                       [](RunConfig& c) -> double& { return c.qubit.pulse_fwhm; }));
    f.push_back(number("qubit", "mu_in", "mean photon number per qubit", positive,
                       [](RunConfig& c) -> double& { return c.qubit.mu_in; }));
    f.push_back(number("qubit", "early_time", "centre of the early bin, us", positive,
                       [](RunConfig& c) -> double& { return c.qubit.early_time; }));
    f.push_back(number("qubit", "window", "middle-bin detection window, us", positive,
                       [](RunConfig& c) -> double& { return c.qubit.window; }));
    f.push_back(list("qubit", "phases_deg", "input qubit phases, degrees", any,
                     [](RunConfig& c) -> std::vector<double>& { return c.qubit.phases_deg; }));
    f.push_back(integer("qubit", "shifts_per_period", "analyzer shifts per fringe period", 3,
                        [](RunConfig& c) -> std::uint64_t& { return c.qubit.shifts_per_period; }));
    f.push_back(number("qubit", "filter_tooth_spacing", "analyzer comb spacing, MHz", positive,
                       [](RunConfig& c) -> double& { return c.qubit.filter_tooth_spacing; }));
    f.push_back(number("qubit", "filter_finesse", "analyzer comb finesse", Range{1.0, kInf},
                       [](RunConfig& c) -> double& { return c.qubit.filter_finesse; }));
    f.push_back(shape("qubit", "filter_shape", "analyzer tooth shape",
                      [](RunConfig& c) -> ToothShape& { return c.qubit.filter_shape; }));
    f.push_back(number("qubit", "filter_bandwidth", "analyzer comb bandwidth, MHz", positive,
                       [](RunConfig& c) -> double& { return c.qubit.filter_bandwidth; }));
    f.push_back(number("qubit", "filter_pit_width", "analyzer spectral pit width, MHz", positive,
                       [](RunConfig& c) -> double& { return c.qubit.filter_pit_width; }));
    f.push_back(number("qubit", "pole_noise", "background photons per bin window for pole states",
                       nonneg, [](RunConfig& c) -> double& { return c.qubit.pole_noise; }));

    f.push_back(list("scan", "storage_times", "storage times, us", positive,
                     [](RunConfig& c) -> std::vector<double>& { return c.scan.storage_times; }));
    f.push_back(number("scan", "t2_eff", "decoherence time for exp(-4 tau / T2), us; 0 disables",
                       nonneg, [](RunConfig& c) -> double& { return c.scan.t2_eff; }));
    f.push_back(boolean("scan", "match_depth", "re-match the comb depth at every storage time",
                        [](RunConfig& c) -> bool& { return c.scan.match_depth; }));
    f.push_back(list("scan", "pulse_fwhms", "pulse durations for the bandwidth scan, us", positive,
                     [](RunConfig& c) -> std::vector<double>& { return c.scan.pulse_fwhms; }));
    f.push_back(number("scan", "reference_fwhm", "duration at which mu equals pulse.mu_in, us",
                       positive, [](RunConfig& c) -> double& { return c.scan.reference_fwhm; }));

    f.push_back({"montecarlo", "source",
                 "experiment to emulate: storage, scan-storage-time, scan-bandwidth, qubit-fringe",
                 [](const RunConfig& c) { return std::string(to_string(c.montecarlo.source)); },
                 [](RunConfig& c, std::string_view v) {
                   const auto s = lower(trim(v));
                   if (s == "storage") c.montecarlo.source = McSource::storage;
                   else if (s == "scan-storage-time") c.montecarlo.source = McSource::scan_storage_time;
                   else if (s == "scan-bandwidth") c.montecarlo.source = McSource::scan_bandwidth;
                   else if (s == "qubit-fringe") c.montecarlo.source = McSource::qubit_fringe;
                   else throw ConfigError(0, "montecarlo.source: unknown experiment '" + s + "'");
                 }});
    f.push_back(integer("montecarlo", "pulses_per_cycle", "pulses per cryostat cycle", 1,
                        [](RunConfig& c) -> std::uint64_t& { return c.montecarlo.pulses_per_cycle; }));
    f.push_back(number("montecarlo", "cycle_rate", "cycles per second, Hz", positive,
                       [](RunConfig& c) -> double& { return c.montecarlo.cycle_rate; }));
    f.push_back(number("montecarlo", "duration", "measurement time, s", positive,
                       [](RunConfig& c) -> double& { return c.montecarlo.duration; }));
    f.push_back(number("montecarlo", "dark_rate", "detector dark counts, Hz", nonneg,
                       [](RunConfig& c) -> double& { return c.montecarlo.dark_rate; }));
    f.push_back(number("montecarlo", "reference_reflectivity",
                       "blocked-cavity reflectivity used to normalise the reference",
                       Range{0.0, 1.0, true, false},
                       [](RunConfig& c) -> double& { return c.montecarlo.reference_reflectivity; }));
    f.push_back(number("montecarlo", "detector_efficiency", "detection efficiency", unit,
                       [](RunConfig& c) -> double& { return c.montecarlo.detector_efficiency; }));
    f.push_back(number("montecarlo", "bin_width", "histogram bin width, us", positive,
                       [](RunConfig& c) -> double& { return c.montecarlo.bin_width; }));
    f.push_back(integer("montecarlo", "fringe_trials", "trials per fringe point", 1,
                        [](RunConfig& c) -> std::uint64_t& { return c.montecarlo.fringe_trials; }));
    f.push_back(integer("montecarlo", "seed", "random seed", 0,
                        [](RunConfig& c) -> std::uint64_t& { return c.montecarlo.seed; }));

    f.push_back({"output", "directory", "directory for result files",
                 [](const RunConfig& c) { return c.output.directory; },
                 [](RunConfig& c, std::string_view v) {
                   const auto s = trim(v);
                   if (s.empty()) throw ConfigError(0, "output.directory must not be empty");
                   c.output.directory = s;
                 }});
    return f;
  }();
  return table;
}

const std::vector<std::string>& sections() {
  static const std::vector<std::string> names{"grid",  "comb", "cavity",     "pulse",
                                              "qubit", "scan", "montecarlo", "output"};
  return names;
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string_view to_string(ToothShape shape) {
  return shape == ToothShape::square ? "square" : "gaussian";
}

std::string_view to_string(McSource source) {
  switch (source) {
    case McSource::storage: return "storage";
    case McSource::scan_storage_time: return "scan-storage-time";
    case McSource::scan_bandwidth: return "scan-bandwidth";
    case McSource::qubit_fringe: return "qubit-fringe";
  }
  return "storage";
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const auto body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(line, "parse error: unterminated section header");
      section = lower(trim(std::string_view(body).substr(1, body.size() - 2)));
      if (std::find(sections().begin(), sections().end(), section) == sections().end())
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "parse error: expected key = value");
    if (section.empty()) throw ConfigError(line, "parse error: key outside of a [section]");
    const auto key = lower(trim(std::string_view(body).substr(0, eq)));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) {
      return f.section == section && f.key == key;
    });
    if (it == fields().end())
      throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(line, "duplicate key " + section + "." + key);
    if (value.empty()) throw ConfigError(line, "parse error: " + section + "." + key + " has no value");
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(line, e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& s : sections()) {
    if (!out.empty()) out += "\n";
    out += "[" + s + "]\n";
    for (const auto& f : fields()) {
      if (f.section != s) continue;
      out += "# " + f.doc + "\n";
      out += f.key + " = " + f.get(cfg) + "\n";
    }
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  if (!is_power_of_two(cfg.grid.points))
    throw ConfigError(0, "range violation: grid.points = " + std::to_string(cfg.grid.points) +
                             " must be a power of two");
  if (cfg.cavity.loss >= cfg.cavity.r_out && cfg.cavity.enabled)
    throw ConfigError(0, "range violation: cavity.loss must be below cavity.r_out");
  if (cfg.qubit.bin_separation <= cfg.qubit.pulse_fwhm)
    throw ConfigError(0, "range violation: qubit.bin_separation must exceed qubit.pulse_fwhm");
  if (cfg.scan.storage_times.empty() || cfg.scan.pulse_fwhms.empty() || cfg.qubit.phases_deg.empty())
    throw ConfigError(0, "scan and qubit lists must not be empty");
}

}  // namespace afcsim::cli
