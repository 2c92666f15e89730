#pragma once

#include <span>
#include <vector>

#include "afcsim/medium.hpp"

namespace afcsim {

/// Parameters of the closed-form efficiency of a comb in an asymmetric cavity.
struct EfficiencyModel {
  double d_tilde = 0.4;   // comb-averaged OD per pass
  double r_out = 0.97;
  double loss = 0.0;      // round-trip intensity loss eps
  double finesse = 5.8;
  ToothShape shape = ToothShape::square;
  double background_od = 0.0;

  void validate() const;
};

/// Echo dephasing factor of a comb: sinc^2(pi/F) for square teeth,
/// exp(-7/F^2) for gaussian teeth.
double eta_dephasing(double finesse, ToothShape shape);

/// Impedance-matched cavity efficiency
///   4 d^2 e^{-2d} R' eta_deph / (1 - R' e^{-2d})^2,  R' = (R_out - eps) e^{-2 d0}.
/// Throws Error(unmatched_configuration) when R' < 0.
double eta_cavity(const EfficiencyModel& m);

/// Cavity efficiency for an arbitrary input mirror, including the mismatch:
///   4 d^2 eta_deph (1-eps) e^{-2d} R_out (1-R_in)^2 / (1 - sqrt(R_in R_out (1-eps)) e^{-d})^4.
/// Loss enters as the amplitude factor sqrt(1-eps) per round trip, as in the
/// simulated cavity. Background OD is ignored here.
double eta_cavity_general(double r_in, const EfficiencyModel& m);

/// Forward single-pass recall d^2 e^{-d} eta_deph e^{-d0}.
double eta_forward(double d_tilde, double eta_deph, double background_od = 0.0);

/// d = 1/2 ln((R_out - eps) / R_in). Throws Error(unmatched_configuration) when
/// R_in > R_out - eps.
double impedance_matched_depth(double r_in, double r_out, double loss);

struct DepthOptimum {
  double d_tilde = 0.0;
  double efficiency = 0.0;
  bool degenerate = false;  // no positive efficiency reachable
};

/// Maximizes eta_cavity over d in (0, 5].
DepthOptimum optimize_depth(double r_out, double loss, double finesse, ToothShape shape,
                            double background_od = 0.0);

/// Maximizes eta_forward over d in (0, 5]; the optimum is d = 2.
DepthOptimum optimize_forward_depth(double eta_deph = 1.0, double background_od = 0.0);

struct DecayPoint {
  double storage_time = 0.0;  // us
  double efficiency = 0.0;
};

struct DecayFit {
  double eta0 = 0.0;
  double t2_eff = 0.0;  // us
  double residual_norm = 0.0;  // 2-norm of the ln-space residuals
};

/// eta = eta0 exp(-4 tau / T2) by linear regression of ln eta on tau.
DecayFit fit_decay(std::span<const DecayPoint> points);

double decay_model(const DecayFit& fit, double storage_time);

}  // namespace afcsim
