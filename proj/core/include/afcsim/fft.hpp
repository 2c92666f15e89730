#pragma once

#include <span>

#include "afcsim/grid.hpp"

namespace afcsim::fft {

// Thin wrappers over FFTW. Forward: X[k] = sum_n x[n] exp(-2 pi i k n / N).
// Inverse includes the 1/N factor, so inverse(forward(x)) == x.
// Safe to call from several threads at once.

void forward(std::span<Complex> data);
void inverse(std::span<Complex> data);

/// Reorders ascending-frequency samples into FFT order (zero frequency first).
void ifftshift(std::span<Complex> data);
/// Reorders FFT-order samples into ascending-frequency order.
void fftshift(std::span<Complex> data);

}  // namespace afcsim::fft
