#include "afcsim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace afcsim::fft {
namespace {

// FFTW planning touches global state; execution of distinct plans does not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void execute(std::span<Complex> data, int sign) {
  if (data.size() < 2) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void forward(std::span<Complex> data) { execute(data, FFTW_FORWARD); }

void inverse(std::span<Complex> data) {
  execute(data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

void ifftshift(std::span<Complex> data) {
  std::rotate(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(data.size() / 2),
              data.end());
}

void fftshift(std::span<Complex> data) {
  std::rotate(data.begin(),
              data.begin() + static_cast<std::ptrdiff_t>(data.size() - data.size() / 2),
              data.end());
}

}  // namespace afcsim::fft
