#pragma once

#include <span>
#include <vector>

#include "afcsim/medium.hpp"

namespace afcsim {

/// Asymmetric two-mirror resonator around the crystal.
struct CavitySpec {
  double r_in = 0.4;              // input (coupling) mirror intensity reflectivity
  double r_out = 0.97;            // back mirror intensity reflectivity
  double round_trip_loss = 0.0;   // intensity fraction lost per round trip, excluding the medium
  double round_trip_time = 0.001; // us, empty-cavity round trip
  double resonance_offset = 0.0;  // MHz, bare-cavity resonance relative to grid zero

  void validate() const;

  bool operator==(const CavitySpec&) const = default;
};

struct LinewidthReport {
  double fwhm = 0.0;                   // MHz
  double resonance_frequency = 0.0;    // MHz
  double group_delay_at_center = 0.0;  // us, round-trip group delay at resonance
  double effective_fsr = 0.0;          // MHz, 1 / round-trip group delay
};

/// Round-trip phase Theta(f) = 2 arg H(f) - 2 pi (f - f_res) T_rt, unwrapped.
/// The medium is crossed twice per round trip.
std::vector<double> round_trip_phase(const TransferFunction& medium, const CavitySpec& cav);

/// r = (-sqrt(R_in) + sqrt(R_out) M) / (1 - sqrt(R_in R_out) M) with the round-trip
/// factor M = sqrt(1 - eps) H^2 exp(-2 pi i (f - f_res) T_rt).
TransferFunction cavity_reflection(const TransferFunction& medium, const CavitySpec& cav);

/// Field leaking through the back mirror.
TransferFunction cavity_transmission(const TransferFunction& medium, const CavitySpec& cav);

/// Finds the resonance (Theta = 2 pi m) nearest the grid center and measures
/// the full width at half maximum of |tf|^2 around it: half the peak for a
/// transmission peak, half the depth for a reflection dip.
LinewidthReport resonance_linewidth(const TransferFunction& tf,
                                    std::span<const double> round_trip_phase);

/// Signed impedance mismatch R_in - (R_out - eps) exp(-2 d_tilde). Zero when
/// matched, negative when over-coupled.
double check_impedance(double r_in, double r_out, double loss, double effective_depth);

}  // namespace afcsim
