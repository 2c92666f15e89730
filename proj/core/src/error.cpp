#include "afcsim/error.hpp"

namespace afcsim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::grid_too_coarse: return "grid-too-coarse";
    case ErrorKind::bandwidth_exceeds_grid: return "bandwidth-exceeds-grid";
    case ErrorKind::period_not_contained: return "period-not-contained-in-grid";
    case ErrorKind::non_finite_value: return "non-finite-value";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::no_resonance_found: return "no-resonance-found";
    case ErrorKind::pulse_clipped: return "pulse-clipped-by-grid";
    case ErrorKind::overlapping_windows: return "overlapping-windows";
    case ErrorKind::unmatched_configuration: return "unmatched-configuration";
    case ErrorKind::nonpositive_efficiency: return "nonpositive-efficiency-point";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::mismatched_delay: return "mismatched-delay";
    case ErrorKind::no_balance_found: return "no-balance-found";
    case ErrorKind::fit_singular: return "fit-singular";
    case ErrorKind::zero_reference_counts: return "zero-reference-counts";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace afcsim
