#pragma once

#include <vector>

#include "afcsim/cavity.hpp"
#include "afcsim/grid.hpp"
#include "afcsim/medium.hpp"

namespace afcsim {

/// Complex field envelope in photon-number units: sum |E|^2 dt = mean photon number.
struct PulseEnvelope {
  TimeGrid grid;
  ComplexVector values;
  double mean_photon_number = 0.0;

  double energy() const;
  /// Time of the intensity maximum, refined by a parabola through the peak sample.
  double peak_time() const;
};

struct StorageResult {
  PulseEnvelope output_trace;
  double efficiency = 0.0;          // energy in the first echo window / input energy
  double reflected_fraction = 0.0;  // energy in the input window / input energy
  double input_time = 0.0;          // us
  std::vector<double> echo_times;   // us, local maxima near multiples of the storage time
  std::vector<double> window_energies;  // photons, window k centred at input_time + k tau
};

/// Gaussian intensity pulse of the given FWHM centred at `center`, holding
/// mu_in photons, with carrier offset `detuning` MHz. Lives on the time grid
/// conjugate to `grid`, starting at t = 0.
PulseEnvelope make_gaussian_pulse(double fwhm, double center, double mu_in, double detuning,
                                  const FrequencyGrid& grid);

/// Spectral intensity FWHM (MHz) of a transform-limited gaussian pulse.
double gaussian_bandwidth(double fwhm);

/// IFFT(FFT(pulse) * tf). tf must live on the conjugate grid, centred at zero.
PulseEnvelope propagate(const PulseEnvelope& pulse, const TransferFunction& tf);

/// Photon number in [t_lo, t_hi), by sample.
double window_energy(const PulseEnvelope& pulse, double t_lo, double t_hi);

/// Windowed efficiency: windows of width `window` centred on the input peak and
/// on the input peak + tau. The windows may touch but not overlap.
StorageResult storage_efficiency(const PulseEnvelope& input, const PulseEnvelope& output,
                                 double tau, double window, double echo_threshold = 1e-3);

/// One storage experiment: comb in a cavity (or bare crystal), one gaussian probe.
struct StorageSetup {
  CombSpec comb;
  SpectralPit pit;
  CavitySpec cavity;
  FrequencyGrid grid;
  double pulse_fwhm = 1.0;   // us
  double pulse_center = 4.0; // us
  double mu_in = 0.33;
  double window = 2.0;       // us
  bool use_cavity = true;
};

/// Reflection of the cavity-enclosed comb, or the single-pass transfer when
/// use_cavity is false.
TransferFunction memory_transfer(const StorageSetup& setup);

StorageResult run_storage(const StorageSetup& setup);

/// Smallest power-of-two grid of the given span that resolves every tooth with
/// 16 samples and holds at least `min_duration` us of time.
FrequencyGrid choose_grid(const CombSpec& comb, double span, double min_duration);

struct BandwidthPoint {
  double pulse_fwhm = 0.0;  // us
  double bandwidth = 0.0;   // MHz
  double mu_in = 0.0;
  double efficiency = 0.0;
  double reflected_fraction = 0.0;
};

/// Efficiency versus pulse duration at constant peak power: mu scales with the
/// FWHM, equal to setup.mu_in at reference_fwhm.
std::vector<BandwidthPoint> scan_bandwidth(const StorageSetup& setup,
                                           const std::vector<double>& pulse_fwhms,
                                           double reference_fwhm = 1.0);

struct StorageTimePoint {
  double storage_time = 0.0;  // us
  double effective_depth = 0.0;
  double eta_cavity = 0.0;
  double eta_single_pass = 0.0;
  std::size_t grid_points = 0;
};

/// Efficiency versus storage time. Each point uses tooth spacing 1/tau, the
/// impedance-matched depth for the cavity (when match_depth is set), and its own
/// grid. A positive t2_eff multiplies both efficiencies by exp(-4 tau / t2_eff).
std::vector<StorageTimePoint> scan_storage_time(const StorageSetup& setup,
                                                const std::vector<double>& storage_times,
                                                double t2_eff = 0.0, bool match_depth = true);

}  // namespace afcsim
