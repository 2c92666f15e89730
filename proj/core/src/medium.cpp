#include "afcsim/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "afcsim/error.hpp"
#include "afcsim/fft.hpp"

namespace afcsim {
namespace {

constexpr double kMinSamplesPerTooth = 16.0;
constexpr double kApodizedFraction = 0.05;

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Tooth index range [first, last] with centers inside the comb bandwidth.
std::pair<long, long> tooth_range(const CombSpec& spec) {
  const double half = spec.bandwidth / (2.0 * spec.tooth_spacing);
  const auto first = static_cast<long>(std::ceil(-half - 0.5 - 1e-9));
  const auto last = static_cast<long>(std::floor(half - 0.5 + 1e-9));
  return {first, last};
}

}  // namespace

void CombSpec::validate() const {
  require(std::isfinite(tooth_spacing) && tooth_spacing > 0.0, ErrorKind::invalid_argument,
          "tooth_spacing must be positive");
  require(std::isfinite(finesse) && finesse >= 1.0, ErrorKind::invalid_argument,
          "comb finesse must be >= 1");
  require(std::isfinite(peak_od) && peak_od >= 0.0, ErrorKind::invalid_argument,
          "peak_od must be >= 0");
  require(std::isfinite(background_od) && background_od >= 0.0, ErrorKind::invalid_argument,
          "background_od must be >= 0");
  require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorKind::invalid_argument,
          "comb bandwidth must be positive");
  require(std::isfinite(center_offset), ErrorKind::invalid_argument,
          "comb center offset must be finite");
}

TransferFunction TransferFunction::constant(const FrequencyGrid& grid, Complex value) {
  return TransferFunction{grid, ComplexVector(grid.n_points, value)};
}

TransferFunction TransferFunction::delay(const FrequencyGrid& grid, double tau) {
  TransferFunction tf{grid, ComplexVector(grid.n_points)};
  for (std::size_t j = 0; j < grid.n_points; ++j)
    tf.values[j] = std::polar(1.0, -2.0 * std::numbers::pi * grid.frequency(j) * tau);
  return tf;
}

double TransferFunction::max_magnitude() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double tooth_area_factor(ToothShape shape) {
  switch (shape) {
    case ToothShape::square: return 1.0;
    case ToothShape::gaussian: return std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
  }
  return 1.0;
}

double peak_od_for_effective_depth(ToothShape shape, double finesse, double effective_depth,
                                   double background_od) {
  require(finesse >= 1.0, ErrorKind::invalid_argument, "comb finesse must be >= 1");
  require(effective_depth >= background_od, ErrorKind::invalid_argument,
          "effective depth below the background OD");
  return (effective_depth - background_od) * finesse / tooth_area_factor(shape);
}

AbsorptionProfile build_comb_profile(const CombSpec& spec, const FrequencyGrid& grid,
                                     const SpectralPit& pit) {
  spec.validate();
  grid.validate();
  const double df = grid.spacing();
  const double width = spec.tooth_width();
  // A comb without teeth needs no tooth resolution.
  const bool has_teeth = spec.peak_od > 0.0 || spec.background_od > 0.0;
  require(!has_teeth || width / df >= kMinSamplesPerTooth, ErrorKind::grid_too_coarse,
          "tooth width " + std::to_string(width) + " MHz spans " +
              std::to_string(width / df) + " samples, need >= 16");
  require(grid.span >= 4.0 * spec.bandwidth, ErrorKind::bandwidth_exceeds_grid,
          "grid span " + std::to_string(grid.span) + " MHz must cover 4x the comb bandwidth " +
              std::to_string(spec.bandwidth) + " MHz");
  require(std::isfinite(pit.width) && pit.width > 0.0 && std::isfinite(pit.line_od) &&
              pit.line_od >= 0.0,
          ErrorKind::invalid_argument, "spectral pit needs positive width and OD >= 0");
  require(std::abs(spec.center_offset) + spec.bandwidth / 2.0 <= pit.width / 2.0,
          ErrorKind::invalid_argument, "comb must lie inside the spectral pit");

  const double band_lo = spec.center_offset - spec.bandwidth / 2.0;
  const double band_hi = spec.center_offset + spec.bandwidth / 2.0;
  const auto [first, last] = tooth_range(spec);
  const double spacing = spec.tooth_spacing;
  const auto tooth_center = [&](long k) {
    return spec.center_offset + (static_cast<double>(k) + 0.5) * spacing;
  };
  const double gauss_k = 4.0 * std::numbers::ln2 / (width * width);

  AbsorptionProfile profile{grid, std::vector<double>(grid.n_points)};
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double f = grid.frequency(j);
    const double a = f - df / 2.0;
    const double b = f + df / 2.0;
    const double in_pit = overlap(a, b, -pit.width / 2.0, pit.width / 2.0) / df;
    double od = pit.line_od * (1.0 - in_pit);
    od += spec.background_od * overlap(a, b, band_lo, band_hi) / df;

    if (spec.peak_od > 0.0) {
      const double nearest = (f - spec.center_offset) / spacing - 0.5;
      const long reach = spec.shape == ToothShape::square ? 1 : 7;
      const long k0 = std::max(first, static_cast<long>(std::floor(nearest)) - reach);
      const long k1 = std::min(last, static_cast<long>(std::ceil(nearest)) + reach);
      for (long k = k0; k <= k1; ++k) {
        const double c = tooth_center(k);
        if (spec.shape == ToothShape::square) {
          od += spec.peak_od * overlap(a, b, c - width / 2.0, c + width / 2.0) / df;
        } else {
          const double x = f - c;
          od += spec.peak_od * std::exp(-gauss_k * x * x);
        }
      }
    }
    profile.od[j] = od;
  }
  return profile;
}

double comb_effective_depth(const AbsorptionProfile& profile, double spacing) {
  const auto& grid = profile.grid;
  require(spacing > 0.0, ErrorKind::invalid_argument, "tooth spacing must be positive");
  require(profile.od.size() == grid.n_points, ErrorKind::grid_mismatch,
          "profile size does not match its grid");
  const double df = grid.spacing();
  const double lo = grid.center_frequency - spacing / 2.0;
  const double hi = grid.center_frequency + spacing / 2.0;
  require(lo >= grid.min_frequency() - df / 2.0 && hi <= grid.max_frequency() + df / 2.0,
          ErrorKind::period_not_contained, "one comb period does not fit in the grid");

  const std::size_t j0 = grid.index_of(lo);
  const std::size_t j1 = grid.index_of(hi);
  double integral = 0.0;
  for (std::size_t j = (j0 > 0 ? j0 - 1 : 0); j <= std::min(j1 + 1, grid.n_points - 1); ++j) {
    const double f = grid.frequency(j);
    integral += profile.od[j] * overlap(f - df / 2.0, f + df / 2.0, lo, hi);
  }
  return integral / spacing;
}

std::vector<double> apodize_edges(std::span<const double> od) {
  std::vector<double> out(od.begin(), od.end());
  const std::size_t n = out.size();
  if (n < 4) return out;
  const double edge = 0.5 * (od.front() + od.back());
  const auto m = static_cast<std::size_t>(std::ceil(kApodizedFraction * static_cast<double>(n)));
  for (std::size_t j = 0; j < m && j < n / 2; ++j) {
    const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                           static_cast<double>(m)));
    out[j] = w * od[j] + (1.0 - w) * edge;
    out[n - 1 - j] = w * od[n - 1 - j] + (1.0 - w) * edge;
  }
  return out;
}

std::vector<double> kramers_kronig_phase(const AbsorptionProfile& profile) {
  const std::size_t n = profile.od.size();
  require(n == profile.grid.n_points && n >= 2, ErrorKind::grid_mismatch,
          "profile size does not match its grid");
  for (double v : profile.od)
    require(std::isfinite(v), ErrorKind::non_finite_value, "OD profile has non-finite values");

  const auto smooth = apodize_edges(profile.od);
  ComplexVector work(n);
  for (std::size_t j = 0; j < n; ++j) work[j] = Complex(-0.5 * smooth[j], 0.0);

  // Fold the (Hermitian) cepstrum onto non-negative quefrencies: the result is
  // analytic in the lower half plane, i.e. a causal response.
  fft::ifftshift(work);
  fft::inverse(work);
  for (std::size_t q = 1; q < n / 2; ++q) work[q] *= 2.0;
  for (std::size_t q = n / 2 + 1; q < n; ++q) work[q] = 0.0;
  fft::forward(work);
  fft::fftshift(work);

  std::vector<double> phase(n);
  for (std::size_t j = 0; j < n; ++j) phase[j] = work[j].imag();
  return phase;
}

TransferFunction single_pass_transfer(const AbsorptionProfile& profile) {
  const auto phase = kramers_kronig_phase(profile);
  TransferFunction tf{profile.grid, ComplexVector(profile.od.size())};
  for (std::size_t j = 0; j < tf.values.size(); ++j)
    tf.values[j] = std::exp(Complex(-0.5 * profile.od[j], phase[j]));
  return tf;
}

double group_delay(std::span<const double> phase, const FrequencyGrid& grid, std::size_t j) {
  require(phase.size() == grid.n_points && grid.n_points >= 3, ErrorKind::grid_mismatch,
          "phase array does not match the grid");
  const std::size_t lo = j == 0 ? 0 : j - 1;
  const std::size_t hi = std::min(j + 1, grid.n_points - 1);
  const double slope = (phase[hi] - phase[lo]) / (grid.frequency(hi) - grid.frequency(lo));
  return -slope / (2.0 * std::numbers::pi);
}

std::vector<double> unwrapped_phase(const TransferFunction& tf) {
  std::vector<double> phase(tf.values.size());
  double offset = 0.0;
  for (std::size_t j = 0; j < phase.size(); ++j) {
    const double raw = std::arg(tf.values[j]);
    if (j > 0) {
      const double step = raw - (phase[j - 1] - offset);
      offset -= 2.0 * std::numbers::pi * std::round(step / (2.0 * std::numbers::pi));
    }
    phase[j] = raw + offset;
  }
  return phase;
}

}  // namespace afcsim
