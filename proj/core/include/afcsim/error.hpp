#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afcsim {

/// Failure categories raised by the simulation library.
enum class ErrorKind {
  invalid_argument,
  grid_too_coarse,
  bandwidth_exceeds_grid,
  period_not_contained,
  non_finite_value,
  grid_mismatch,
  no_resonance_found,
  pulse_clipped,
  overlapping_windows,
  unmatched_configuration,
  nonpositive_efficiency,
  degenerate_fit,
  mismatched_delay,
  no_balance_found,
  fit_singular,
  zero_reference_counts,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws Error(kind, message) unless condition holds.
inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace afcsim
