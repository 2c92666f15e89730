#include "afcsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afcsim/error.hpp"

namespace afcsim {

double FrequencyGrid::frequency(std::size_t j) const {
  return center_frequency +
         (static_cast<double>(j) - static_cast<double>(n_points / 2)) * spacing();
}

std::size_t FrequencyGrid::index_of(double f) const {
  const double pos = (f - center_frequency) / spacing() + static_cast<double>(n_points / 2);
  const double clamped = std::clamp(std::round(pos), 0.0, static_cast<double>(n_points - 1));
  return static_cast<std::size_t>(clamped);
}

void FrequencyGrid::validate() const {
  require(n_points >= 2 && is_power_of_two(n_points), ErrorKind::invalid_argument,
          "frequency grid needs a power-of-two point count >= 2, got " +
              std::to_string(n_points));
  require(std::isfinite(span) && span > 0.0, ErrorKind::invalid_argument,
          "frequency grid span must be positive");
  require(std::isfinite(center_frequency), ErrorKind::invalid_argument,
          "frequency grid center must be finite");
}

TimeGrid conjugate_time_grid(const FrequencyGrid& grid, double start) {
  return TimeGrid{start, 1.0 / grid.span, grid.n_points};
}

bool are_conjugate(const TimeGrid& time, const FrequencyGrid& freq) {
  if (time.n_points != freq.n_points) return false;
  const double product = time.step * freq.spacing() * static_cast<double>(freq.n_points);
  return std::abs(product - 1.0) < 1e-9;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace afcsim
