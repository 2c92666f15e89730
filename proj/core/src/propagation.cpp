#include "afcsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "afcsim/analytics.hpp"
#include "afcsim/error.hpp"
#include "afcsim/fft.hpp"
#include "afcsim/parallel.hpp"

namespace afcsim {
namespace {

constexpr std::size_t kMaxEchoOrder = 8;

double sigma_from_fwhm(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

// Parabolic refinement of a sampled maximum at index n.
double refine_peak(const std::vector<double>& y, std::size_t n, const TimeGrid& grid) {
  if (n == 0 || n + 1 >= y.size()) return grid.time(n);
  const double a = y[n - 1];
  const double b = y[n];
  const double c = y[n + 1];
  const double denom = a - 2.0 * b + c;
  const double shift = denom == 0.0 ? 0.0 : 0.5 * (a - c) / denom;
  return grid.time(n) + std::clamp(shift, -0.5, 0.5) * grid.step;
}

std::vector<double> intensity(const PulseEnvelope& p) {
  std::vector<double> out(p.values.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = std::norm(p.values[n]);
  return out;
}

}  // namespace

double PulseEnvelope::energy() const {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return sum * grid.step;
}

double PulseEnvelope::peak_time() const {
  require(!values.empty(), ErrorKind::invalid_argument, "empty pulse");
  const auto y = intensity(*this);
  const auto n = static_cast<std::size_t>(std::distance(y.begin(), std::max_element(y.begin(), y.end())));
  return refine_peak(y, n, grid);
}

double gaussian_bandwidth(double fwhm) {
  return 2.0 * std::numbers::ln2 / (std::numbers::pi * fwhm);
}

PulseEnvelope make_gaussian_pulse(double fwhm, double center, double mu_in, double detuning,
                                  const FrequencyGrid& grid) {
  grid.validate();
  require(std::isfinite(mu_in) && mu_in >= 0.0, ErrorKind::invalid_argument,
          "mean photon number must be >= 0");
  require(std::isfinite(detuning), ErrorKind::invalid_argument, "detuning must be finite");
  const TimeGrid tg = conjugate_time_grid(grid);
  require(std::isfinite(fwhm) && fwhm >= 4.0 * tg.step, ErrorKind::pulse_clipped,
          "pulse FWHM " + std::to_string(fwhm) + " us is below 4 time steps (" +
              std::to_string(4.0 * tg.step) + " us)");
  const double sigma = sigma_from_fwhm(fwhm);
  require(center - 5.0 * sigma >= tg.start && center + 5.0 * sigma <= tg.time(tg.n_points - 1),
          ErrorKind::pulse_clipped,
          "pulse centred at " + std::to_string(center) + " us does not fit the " +
              std::to_string(tg.duration()) + " us time grid with a 5 sigma margin");

  PulseEnvelope p{tg, ComplexVector(tg.n_points), mu_in};
  if (mu_in == 0.0) return p;
  double sum = 0.0;
  for (std::size_t n = 0; n < tg.n_points; ++n) {
    const double t = tg.time(n);
    const double x = (t - center) / sigma;
    p.values[n] = std::polar(std::exp(-0.25 * x * x), 2.0 * std::numbers::pi * detuning * t);
    sum += std::norm(p.values[n]);
  }
  const double scale = std::sqrt(mu_in / (sum * tg.step));
  for (auto& v : p.values) v *= scale;
  return p;
}

PulseEnvelope propagate(const PulseEnvelope& pulse, const TransferFunction& tf) {
  require(pulse.values.size() == pulse.grid.n_points, ErrorKind::grid_mismatch,
          "pulse size does not match its grid");
  require(tf.values.size() == tf.grid.n_points, ErrorKind::grid_mismatch,
          "transfer function size does not match its grid");
  require(are_conjugate(pulse.grid, tf.grid), ErrorKind::grid_mismatch,
          "pulse and transfer function grids are not FFT-conjugate");
  require(tf.grid.center_frequency == 0.0, ErrorKind::grid_mismatch,
          "transfer function grid must be centred on the carrier");

  const std::size_t n = pulse.values.size();
  PulseEnvelope out{pulse.grid, pulse.values, 0.0};
  fft::forward(out.values);
  for (std::size_t k = 0; k < n; ++k) out.values[k] *= tf.values[(k + n / 2) % n];
  fft::inverse(out.values);
  out.mean_photon_number = out.energy();
  return out;
}

double window_energy(const PulseEnvelope& pulse, double t_lo, double t_hi) {
  const auto& g = pulse.grid;
  const double first = std::ceil((t_lo - g.start) / g.step - 1e-9);
  const double last = std::ceil((t_hi - g.start) / g.step - 1e-9);
  const auto lo = static_cast<std::size_t>(std::clamp(first, 0.0, static_cast<double>(g.n_points)));
  const auto hi = static_cast<std::size_t>(std::clamp(last, 0.0, static_cast<double>(g.n_points)));
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += std::norm(pulse.values[i]);
  return sum * g.step;
}

StorageResult storage_efficiency(const PulseEnvelope& input, const PulseEnvelope& output,
                                 double tau, double window, double echo_threshold) {
  require(input.grid == output.grid && input.values.size() == output.values.size(),
          ErrorKind::grid_mismatch, "input and output traces live on different grids");
  require(std::isfinite(window) && window > 0.0, ErrorKind::invalid_argument,
          "detection window must be positive");
  require(std::isfinite(tau) && tau > 0.0, ErrorKind::invalid_argument,
          "storage time must be positive");
  require(tau >= window * (1.0 - 1e-12), ErrorKind::overlapping_windows,
          "echo window overlaps the input window: storage time " + std::to_string(tau) +
              " us < window " + std::to_string(window) + " us");
  const double e_in = input.energy();
  require(e_in > 0.0, ErrorKind::invalid_argument, "input pulse carries no energy");

  StorageResult res;
  res.output_trace = output;
  res.input_time = input.peak_time();
  const auto& g = output.grid;
  const double t_end = g.time(g.n_points - 1) + g.step;
  require(res.input_time + tau + window / 2.0 <= t_end, ErrorKind::pulse_clipped,
          "first echo window extends past the end of the time grid");

  const auto y = intensity(output);
  for (std::size_t k = 0; k <= kMaxEchoOrder; ++k) {
    const double c = res.input_time + static_cast<double>(k) * tau;
    if (c + window / 2.0 > t_end) break;
    const double e = window_energy(output, c - window / 2.0, c + window / 2.0);
    res.window_energies.push_back(e);
    if (k == 0 || e < echo_threshold * e_in) continue;
    const auto lo = static_cast<std::size_t>(
        std::max(0.0, std::ceil((c - window / 2.0 - g.start) / g.step)));
    const auto hi = std::min(
        g.n_points, static_cast<std::size_t>(std::ceil((c + window / 2.0 - g.start) / g.step)));
    if (hi <= lo + 2) continue;
    const auto it = std::max_element(y.begin() + static_cast<long>(lo), y.begin() + static_cast<long>(hi));
    const auto n = static_cast<std::size_t>(std::distance(y.begin(), it));
    if (n == lo || n + 1 == hi) continue;  // window edge, not a local maximum
    res.echo_times.push_back(refine_peak(y, n, g));
  }
  res.reflected_fraction = res.window_energies[0] / e_in;
  res.efficiency = res.window_energies.size() > 1 ? res.window_energies[1] / e_in : 0.0;
  return res;
}

TransferFunction memory_transfer(const StorageSetup& setup) {
  const auto profile = build_comb_profile(setup.comb, setup.grid, setup.pit);
  auto medium = single_pass_transfer(profile);
  if (!setup.use_cavity) return medium;
  return cavity_reflection(medium, setup.cavity);
}

StorageResult run_storage(const StorageSetup& setup) {
  const auto tf = memory_transfer(setup);
  const auto pulse =
      make_gaussian_pulse(setup.pulse_fwhm, setup.pulse_center, setup.mu_in, 0.0, setup.grid);
  return storage_efficiency(pulse, propagate(pulse, tf), setup.comb.storage_time(), setup.window);
}

FrequencyGrid choose_grid(const CombSpec& comb, double span, double min_duration) {
  comb.validate();
  require(std::isfinite(span) && span > 0.0, ErrorKind::invalid_argument,
          "grid span must be positive");
  const double df_max = comb.tooth_width() / 16.0;
  const auto by_resolution = static_cast<std::size_t>(std::ceil(span / df_max - 1e-9));
  const auto by_duration = static_cast<std::size_t>(std::ceil(min_duration * span - 1e-9));
  const std::size_t n = next_power_of_two(std::max<std::size_t>({2, by_resolution, by_duration}));
  return FrequencyGrid{0.0, span, n};
}

std::vector<BandwidthPoint> scan_bandwidth(const StorageSetup& setup,
                                           const std::vector<double>& pulse_fwhms,
                                           double reference_fwhm) {
  require(std::isfinite(reference_fwhm) && reference_fwhm > 0.0, ErrorKind::invalid_argument,
          "reference FWHM must be positive");
  const auto tf = memory_transfer(setup);
  std::vector<BandwidthPoint> out(pulse_fwhms.size());
  parallel_for(pulse_fwhms.size(), [&](std::size_t i) {
    const double fwhm = pulse_fwhms[i];
    const double mu = setup.mu_in * fwhm / reference_fwhm;
    const auto pulse = make_gaussian_pulse(fwhm, setup.pulse_center, mu, 0.0, setup.grid);
    const auto res =
        storage_efficiency(pulse, propagate(pulse, tf), setup.comb.storage_time(), setup.window);
    out[i] = {fwhm, gaussian_bandwidth(fwhm), mu, res.efficiency, res.reflected_fraction};
  });
  return out;
}

std::vector<StorageTimePoint> scan_storage_time(const StorageSetup& setup,
                                                const std::vector<double>& storage_times,
                                                double t2_eff, bool match_depth) {
  require(std::isfinite(t2_eff) && t2_eff >= 0.0, ErrorKind::invalid_argument,
          "t2_eff must be >= 0 (0 disables decoherence)");
  for (double tau : storage_times)
    require(std::isfinite(tau) && tau > 0.0, ErrorKind::invalid_argument,
            "storage times must be positive");

  std::vector<StorageTimePoint> out(storage_times.size());
  parallel_for(storage_times.size(), [&](std::size_t i) {
    const double tau = storage_times[i];
    StorageSetup s = setup;
    s.comb.tooth_spacing = 1.0 / tau;
    if (match_depth) {
      const double d = impedance_matched_depth(s.cavity.r_in, s.cavity.r_out,
                                               s.cavity.round_trip_loss);
      s.comb.peak_od =
          peak_od_for_effective_depth(s.comb.shape, s.comb.finesse, d, s.comb.background_od);
    }
    const double needed = s.pulse_center + tau + s.window + 5.0 * s.pulse_fwhm;
    s.grid = choose_grid(s.comb, setup.grid.span, 2.0 * needed);

    const auto profile = build_comb_profile(s.comb, s.grid, s.pit);
    const auto medium = single_pass_transfer(profile);
    const auto cavity = cavity_reflection(medium, s.cavity);
    const auto pulse = make_gaussian_pulse(s.pulse_fwhm, s.pulse_center, s.mu_in, 0.0, s.grid);
    const auto with_cavity = storage_efficiency(pulse, propagate(pulse, cavity), tau, s.window);
    const auto single = storage_efficiency(pulse, propagate(pulse, medium), tau, s.window);

    const double decay = t2_eff > 0.0 ? std::exp(-4.0 * tau / t2_eff) : 1.0;
    out[i] = {tau, comb_effective_depth(profile, s.comb.tooth_spacing),
              with_cavity.efficiency * decay, single.efficiency * decay, s.grid.n_points};
  });
  return out;
}

}  // namespace afcsim
