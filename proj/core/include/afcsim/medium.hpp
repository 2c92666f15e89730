#pragma once

#include <span>
#include <vector>

#include "afcsim/grid.hpp"

namespace afcsim {

enum class ToothShape { square, gaussian };

/// Parametric atomic frequency comb.
///
/// Teeth sit at center_offset + (k + 1/2) * tooth_spacing for every k whose
/// tooth center lies inside the comb bandwidth, so the comb center falls in a
/// transparent gap. A square tooth is a flat top of width spacing/finesse; a
/// gaussian tooth has that FWHM. OD is natural-log intensity optical depth per
/// pass (transmission exp(-d)).
struct CombSpec {
  double tooth_spacing = 0.5;  // MHz
  double finesse = 5.8;
  ToothShape shape = ToothShape::square;
  double peak_od = 2.32;
  double background_od = 0.0;   // added under the teeth inside the comb bandwidth
  double bandwidth = 12.0;      // MHz
  double center_offset = 0.0;   // MHz

  double tooth_width() const { return tooth_spacing / finesse; }
  double storage_time() const { return 1.0 / tooth_spacing; }  // us
  void validate() const;

  bool operator==(const CombSpec&) const = default;
};

/// Transparent window burned into the inhomogeneous line before the comb is
/// prepared. OD is zero inside |f| < width/2 (apart from the comb) and
/// line_od outside it.
struct SpectralPit {
  double width = 18.0;  // MHz
  double line_od = 0.0;

  bool operator==(const SpectralPit&) const = default;
};

struct AbsorptionProfile {
  FrequencyGrid grid;
  std::vector<double> od;
};

/// Complex frequency response sampled on a grid (ascending frequency).
struct TransferFunction {
  FrequencyGrid grid;
  ComplexVector values;

  static TransferFunction constant(const FrequencyGrid& grid, Complex value);
  /// Pure delay by tau us: exp(-2 pi i f tau).
  static TransferFunction delay(const FrequencyGrid& grid, double tau);
  double max_magnitude() const;
};

/// Ratio of one tooth's area to (peak height * tooth width): 1 for square,
/// sqrt(pi / (4 ln 2)) for gaussian.
double tooth_area_factor(ToothShape shape);

/// Peak OD that gives the requested comb-averaged depth.
double peak_od_for_effective_depth(ToothShape shape, double finesse, double effective_depth,
                                   double background_od = 0.0);

/// Renders the comb and the pit onto the grid. Square teeth and pit edges are
/// cell-averaged so the rendered area is exact.
AbsorptionProfile build_comb_profile(const CombSpec& spec, const FrequencyGrid& grid,
                                     const SpectralPit& pit = {});

/// OD averaged over one period of width `spacing` centred on the grid center.
double comb_effective_depth(const AbsorptionProfile& profile, double spacing);

/// Blends the outer 5% of each grid edge towards the mean edge value with a
/// raised-cosine window.
std::vector<double> apodize_edges(std::span<const double> od);

/// Minimum-phase (causal) spectral phase accompanying the amplitude
/// attenuation -od/2, via a folded-cepstrum discrete Hilbert transform of the
/// apodized profile.
std::vector<double> kramers_kronig_phase(const AbsorptionProfile& profile);

/// H(f) = exp(-od(f)/2 + i phi(f)).
TransferFunction single_pass_transfer(const AbsorptionProfile& profile);

/// -(1/2pi) d(phase)/df at sample j by central difference, in us.
double group_delay(std::span<const double> phase, const FrequencyGrid& grid, std::size_t j);

/// Continuous phase of the transfer values, unwrapped along frequency.
std::vector<double> unwrapped_phase(const TransferFunction& tf);

}  // namespace afcsim
