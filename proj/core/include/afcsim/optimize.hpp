#pragma once

#include <functional>

namespace afcsim {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi]; stops
/// when the bracket is narrower than tol.
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol = 1e-8);

/// Root of f on [lo, hi] by Illinois false position. f(lo) and f(hi) must
/// differ in sign; throws Error(invalid_argument) otherwise.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol = 1e-10, int max_iterations = 200);

}  // namespace afcsim
