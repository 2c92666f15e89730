#pragma once

#include <numbers>
#include <vector>

#include "afcsim/medium.hpp"
#include "afcsim/propagation.hpp"

namespace afcsim {

/// a_e |e> + a_l e^{i delta} |l>, encoded as two gaussian pulses.
struct TimeBinQubit {
  Complex amp_early{std::numbers::sqrt2 / 2.0, 0.0};
  Complex amp_late{std::numbers::sqrt2 / 2.0, 0.0};
  double relative_phase = 0.0;  // rad
  double bin_separation = 1.0;  // us
  double pulse_fwhm = 0.51;     // us
  double mu_in = 0.25;

  void validate() const;

  static TimeBinQubit equator(double delta);
  static TimeBinQubit early();
  static TimeBinQubit late();
};

/// Two pulses at early_time and early_time + bin_separation. Each bin is
/// normalised on its own to |a|^2 mu_in photons; when the gaussians overlap,
/// the total differs from mu_in by their interference term.
PulseEnvelope make_timebin_qubit(const TimeBinQubit& q, const FrequencyGrid& grid,
                                 double early_time);

/// Single-pass filter crystal with its comb shifted by `spectral_shift` MHz.
/// The comb delay 1/spacing must equal bin_separation within 1%.
TransferFunction analyzer_transfer(const CombSpec& filter_comb, double spectral_shift,
                                   const FrequencyGrid& grid, double bin_separation,
                                   const SpectralPit& pit = {});

/// Interferometer phase imprinted on the echo arm by a comb shift.
double analyzer_phase(double spectral_shift, double tooth_spacing);

/// Adjusts peak_od within (0, 10] until a reference pulse leaves the filter
/// with equal transmitted and first-echo energy (within 0.5%).
CombSpec balance_analyzer(const CombSpec& filter_comb, const FrequencyGrid& grid,
                          const SpectralPit& pit, double reference_fwhm,
                          double reference_center);

struct FringeFit {
  double amplitude = 0.0;     // A
  double visibility = 0.0;    // V
  double phase_offset = 0.0;  // phi0, wrapped to (-pi, pi]
  double visibility_sigma = 0.0;
  double max_residual = 0.0;  // max |p - model| / A
  bool bounded = false;       // unconstrained V exceeded 1 and was pinned to 1
};

/// Least-squares fit of p = A (1 + V cos(phase + phi0)). Weighted by 1/std_error^2
/// when std_error is given (one entry per point, all positive). Needs three
/// distinct phases modulo 2 pi.
FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& p,
                     const std::vector<double>& std_error = {});

struct FringeScan {
  std::vector<double> phases;    // rad
  std::vector<double> p_detect;  // photons per trial in the middle-bin window
  std::vector<double> std_error;
  FringeFit fit;
};

struct FringeSetup {
  TransferFunction memory;      // memory response (cavity reflection)
  double memory_delay = 2.0;    // us
  CombSpec filter_comb;         // balanced analyzer comb
  SpectralPit filter_pit;
  double early_time = 3.0;      // us
  double window = 1.0;          // us
};

/// Qubit -> memory -> shifted analyzer, integrating the interfering middle bin
/// centred at early_time + memory_delay + bin_separation.
FringeScan fringe_scan(const TimeBinQubit& q, const FringeSetup& setup,
                       const std::vector<double>& shifts);

/// Correct-bin probability (correct + noise) / (correct + wrong + 2 noise).
double pole_fidelity_from_energies(double correct, double wrong, double noise = 0.0);

/// Stores |e> and |l> in the memory, reads both bins through a transparent
/// filter, and averages the two correct-bin probabilities. `noise` is the mean
/// background photon number per bin window.
double pole_fidelity(const TimeBinQubit& q, const TransferFunction& memory, double memory_delay,
                     double early_time, double window, double noise = 0.0);

struct FidelityReport {
  double v_coh = 0.0;
  double f_coh = 0.0;
  double f_pole = 0.0;
  double f_total = 0.0;
  double f_threshold = 0.0;
  bool passes_quantum_bound = false;
};

FidelityReport fidelity_report(double v_coh, double f_pole, double mu_in, double efficiency);

/// Best measure-and-prepare fidelity for a weak coherent input of mean mu
/// stored with efficiency eta. The classical strategy answers only when it
/// receives at least N photons, with N the smallest threshold whose Poisson
/// tail fits the success probability eta (1 - P0); it then scores the
/// N-photon estimation fidelity (n+1)/(n+2), averaged over the tail.
double wcs_threshold(double mu, double efficiency);

}  // namespace afcsim
