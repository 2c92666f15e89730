#pragma once

#include <complex>
#include <cstddef>
#include <vector>

// Unit system used throughout afcsim: frequencies in MHz, times in microseconds.
// A frequency grid of span S MHz and N points is FFT-conjugate to a time grid of
// step 1/S us and the same N points.

namespace afcsim {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Uniform frequency grid, stored in ascending order.
///
/// Sample j sits at center_frequency + (j - n_points/2) * spacing(). The zero
/// of the frequency axis is the pulse carrier.
struct FrequencyGrid {
  double center_frequency = 0.0;  // MHz
  double span = 64.0;             // MHz
  std::size_t n_points = 65536;

  double spacing() const { return span / static_cast<double>(n_points); }
  double frequency(std::size_t j) const;
  double min_frequency() const { return frequency(0); }
  double max_frequency() const { return frequency(n_points - 1); }
  /// Nearest sample index to f, clamped to the grid.
  std::size_t index_of(double f) const;

  /// Throws Error(invalid_argument) unless n_points is a power of two >= 2 and span > 0.
  void validate() const;

  bool operator==(const FrequencyGrid&) const = default;
};

/// Uniform time grid starting at `start`.
struct TimeGrid {
  double start = 0.0;  // us
  double step = 1.0 / 64.0;
  std::size_t n_points = 65536;

  double time(std::size_t n) const { return start + step * static_cast<double>(n); }
  double duration() const { return step * static_cast<double>(n_points); }

  bool operator==(const TimeGrid&) const = default;
};

/// Time grid conjugate to `grid` (step = 1/span), starting at `start`.
TimeGrid conjugate_time_grid(const FrequencyGrid& grid, double start = 0.0);

/// True when dt * df == 1/N to relative precision 1e-9 and sizes agree.
bool are_conjugate(const TimeGrid& time, const FrequencyGrid& freq);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace afcsim
