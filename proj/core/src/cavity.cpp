#include "afcsim/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "afcsim/error.hpp"

namespace afcsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_grids(const TransferFunction& medium) {
  require(medium.values.size() == medium.grid.n_points, ErrorKind::grid_mismatch,
          "transfer function size does not match its grid");
}

Complex round_trip_factor(const TransferFunction& medium, const CavitySpec& cav, std::size_t j) {
  const double f = medium.grid.frequency(j);
  const Complex h = medium.values[j];
  return std::sqrt(1.0 - cav.round_trip_loss) * h * h *
         std::polar(1.0, -kTwoPi * (f - cav.resonance_offset) * cav.round_trip_time);
}

// Linear interpolation of the frequency where `level` is crossed between j and j+1.
double crossing(const FrequencyGrid& grid, std::span<const double> y, std::size_t j,
                double level) {
  const double y0 = y[j];
  const double y1 = y[j + 1];
  const double t = y1 == y0 ? 0.0 : (level - y0) / (y1 - y0);
  return grid.frequency(j) + t * grid.spacing();
}

}  // namespace

void CavitySpec::validate() const {
  require(in_unit_interval(r_in), ErrorKind::invalid_argument, "r_in must lie in [0, 1]");
  require(in_unit_interval(r_out), ErrorKind::invalid_argument, "r_out must lie in [0, 1]");
  require(std::isfinite(round_trip_loss) && round_trip_loss >= 0.0 && round_trip_loss < 1.0,
          ErrorKind::invalid_argument, "round_trip_loss must lie in [0, 1)");
  require(std::isfinite(round_trip_time) && round_trip_time > 0.0, ErrorKind::invalid_argument,
          "round_trip_time must be positive");
  require(std::isfinite(resonance_offset), ErrorKind::invalid_argument,
          "resonance_offset must be finite");
}

std::vector<double> round_trip_phase(const TransferFunction& medium, const CavitySpec& cav) {
  cav.validate();
  check_grids(medium);
  auto phase = unwrapped_phase(medium);
  for (std::size_t j = 0; j < phase.size(); ++j) {
    const double f = medium.grid.frequency(j);
    phase[j] = 2.0 * phase[j] - kTwoPi * (f - cav.resonance_offset) * cav.round_trip_time;
  }
  return phase;
}

TransferFunction cavity_reflection(const TransferFunction& medium, const CavitySpec& cav) {
  cav.validate();
  check_grids(medium);
  const double a = std::sqrt(cav.r_in);
  const double b = std::sqrt(cav.r_out);
  TransferFunction r{medium.grid, ComplexVector(medium.values.size())};
  for (std::size_t j = 0; j < r.values.size(); ++j) {
    const Complex m = round_trip_factor(medium, cav, j);
    r.values[j] = (-a + b * m) / (1.0 - a * b * m);
  }
  return r;
}

TransferFunction cavity_transmission(const TransferFunction& medium, const CavitySpec& cav) {
  cav.validate();
  check_grids(medium);
  const double a = std::sqrt(cav.r_in);
  const double b = std::sqrt(cav.r_out);
  const double coupling = std::sqrt((1.0 - cav.r_in) * (1.0 - cav.r_out)) *
                          std::pow(1.0 - cav.round_trip_loss, 0.25);
  TransferFunction t{medium.grid, ComplexVector(medium.values.size())};
  for (std::size_t j = 0; j < t.values.size(); ++j) {
    const double f = medium.grid.frequency(j);
    const Complex m = round_trip_factor(medium, cav, j);
    // sqrt of the round-trip factor without a branch cut: one pass of H and half the delay.
    const Complex half = medium.values[j] *
                         std::polar(1.0, -std::numbers::pi * (f - cav.resonance_offset) *
                                             cav.round_trip_time);
    t.values[j] = coupling * half / (1.0 - a * b * m);
  }
  return t;
}

LinewidthReport resonance_linewidth(const TransferFunction& tf,
                                    std::span<const double> round_trip_phase) {
  const auto& grid = tf.grid;
  const std::size_t n = tf.values.size();
  require(n == grid.n_points && round_trip_phase.size() == n && n >= 4, ErrorKind::grid_mismatch,
          "transfer function and round-trip phase must share the grid");

  std::vector<double> power(n);
  for (std::size_t j = 0; j < n; ++j) power[j] = std::norm(tf.values[j]);
  const auto [pmin_it, pmax_it] = std::minmax_element(power.begin(), power.end());
  require(*pmax_it - *pmin_it > 1e-9 * std::max(*pmax_it, 1e-300), ErrorKind::no_resonance_found,
          "transfer function is flat");

  // Resonances: Theta crosses a multiple of 2 pi. Bounds: crossings of odd multiples of pi.
  std::vector<double> cycles(n);
  for (std::size_t j = 0; j < n; ++j) cycles[j] = round_trip_phase[j] / kTwoPi;
  std::optional<std::size_t> best;
  double best_freq = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double lo = std::min(cycles[j], cycles[j + 1]);
    const double hi = std::max(cycles[j], cycles[j + 1]);
    const double m = std::ceil(lo);
    // Half-open [lo, hi): an exact hit on hi is picked up by the next interval.
    if (!(m < hi || (lo == hi && m == lo))) continue;
    const double f = crossing(grid, cycles, j, m);
    if (!best || std::abs(f - grid.center_frequency) < std::abs(best_freq - grid.center_frequency)) {
      best = j;
      best_freq = f;
    }
  }
  require(best.has_value(), ErrorKind::no_resonance_found,
          "round-trip phase never reaches a multiple of 2 pi on the grid");

  std::size_t jr = grid.index_of(best_freq);
  // Region between neighbouring anti-resonances (half-integer cycles) or grid ends.
  const double m_res = std::round(cycles[jr]);
  std::size_t left = jr;
  while (left > 0 && std::abs(cycles[left - 1] - m_res) < 0.5) --left;
  std::size_t right = jr;
  while (right + 1 < n && std::abs(cycles[right + 1] - m_res) < 0.5) ++right;

  const double p_res = power[jr];
  const bool is_peak = p_res >= 0.5 * (power[left] + power[right]);
  double level;
  if (is_peak) {
    level = 0.5 * p_res;
  } else {
    const double baseline = *std::max_element(power.begin() + static_cast<std::ptrdiff_t>(left),
                                              power.begin() + static_cast<std::ptrdiff_t>(right) + 1);
    level = 0.5 * (baseline + p_res);
  }
  const auto outside = [&](double p) { return is_peak ? p <= level : p >= level; };

  std::size_t jhi = jr;
  while (jhi < right && !outside(power[jhi + 1])) ++jhi;
  std::size_t jlo = jr;
  while (jlo > left && !outside(power[jlo - 1])) --jlo;
  require(jhi < right && jlo > left, ErrorKind::no_resonance_found,
          "half-maximum points not found within one free spectral range");
  require(jhi - jlo >= 3, ErrorKind::grid_too_coarse, "resonance narrower than 4 grid samples");

  const double f_hi = crossing(grid, power, jhi, level);
  const double f_lo = crossing(grid, power, jlo - 1, level);

  LinewidthReport report;
  report.fwhm = f_hi - f_lo;
  report.resonance_frequency = best_freq;
  report.group_delay_at_center = group_delay(round_trip_phase, grid, jr);
  report.effective_fsr = report.group_delay_at_center > 0.0
                             ? 1.0 / report.group_delay_at_center
                             : std::numeric_limits<double>::infinity();
  return report;
}

double check_impedance(double r_in, double r_out, double loss, double effective_depth) {
  return r_in - (r_out - loss) * std::exp(-2.0 * effective_depth);
}

}  // namespace afcsim
