#include "afcsim/timebin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "afcsim/error.hpp"
#include "afcsim/optimize.hpp"
#include "afcsim/parallel.hpp"

namespace afcsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxFilterOd = 10.0;

using Mat3 = std::array<std::array<double, 3>, 3>;

double wrap_phase(double x) {
  double y = std::remainder(x, kTwoPi);
  if (y <= -std::numbers::pi) y += kTwoPi;
  return y;
}

// Inverse of a symmetric positive 3x3 matrix by Gauss-Jordan with partial pivoting.
Mat3 invert(Mat3 a) {
  Mat3 inv{};
  for (int i = 0; i < 3; ++i) inv[i][i] = 1.0;
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    require(std::abs(a[piv][c]) > 1e-12 * scale, ErrorKind::fit_singular,
            "fringe normal equations are singular");
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (int k = 0; k < 3; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (int k = 0; k < 3; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

std::size_t distinct_phases(const std::vector<double>& phases) {
  std::vector<double> w;
  for (double p : phases) {
    double x = std::fmod(p, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    w.push_back(x);
  }
  std::sort(w.begin(), w.end());
  std::size_t count = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i == 0 || w[i] - w[i - 1] > 1e-9) ++count;
  if (count > 1 && w.back() - w.front() > kTwoPi - 1e-9) --count;
  return count;
}

double poisson_log_pmf(double mu, int n) {
  return -mu + n * std::log(mu) - std::lgamma(n + 1.0);
}

}  // namespace

void TimeBinQubit::validate() const {
  const double norm = std::norm(amp_early) + std::norm(amp_late);
  require(std::abs(norm - 1.0) <= 1e-12, ErrorKind::invalid_argument,
          "qubit amplitudes must satisfy |a_e|^2 + |a_l|^2 = 1");
  require(std::isfinite(relative_phase), ErrorKind::invalid_argument,
          "relative phase must be finite");
  require(std::isfinite(pulse_fwhm) && pulse_fwhm > 0.0, ErrorKind::invalid_argument,
          "pulse_fwhm must be positive");
  require(std::isfinite(bin_separation) && bin_separation > pulse_fwhm,
          ErrorKind::invalid_argument, "bin_separation must exceed pulse_fwhm");
  require(std::isfinite(mu_in) && mu_in >= 0.0, ErrorKind::invalid_argument,
          "mu_in must be >= 0");
}

TimeBinQubit TimeBinQubit::equator(double delta) {
  TimeBinQubit q;
  q.relative_phase = delta;
  return q;
}

TimeBinQubit TimeBinQubit::early() {
  TimeBinQubit q;
  q.amp_early = 1.0;
  q.amp_late = 0.0;
  return q;
}

TimeBinQubit TimeBinQubit::late() {
  TimeBinQubit q;
  q.amp_early = 0.0;
  q.amp_late = 1.0;
  return q;
}

PulseEnvelope make_timebin_qubit(const TimeBinQubit& q, const FrequencyGrid& grid,
                                 double early_time) {
  q.validate();
  const auto e = make_gaussian_pulse(q.pulse_fwhm, early_time, 1.0, 0.0, grid);
  const auto l = make_gaussian_pulse(q.pulse_fwhm, early_time + q.bin_separation, 1.0, 0.0, grid);
  const double s = std::sqrt(q.mu_in);
  const Complex ce = s * q.amp_early;
  const Complex cl = s * q.amp_late * std::polar(1.0, q.relative_phase);
  PulseEnvelope out{e.grid, ComplexVector(e.values.size()), 0.0};
  for (std::size_t n = 0; n < out.values.size(); ++n)
    out.values[n] = ce * e.values[n] + cl * l.values[n];
  out.mean_photon_number = out.energy();
  return out;
}

double analyzer_phase(double spectral_shift, double tooth_spacing) {
  return kTwoPi * spectral_shift / tooth_spacing;
}

TransferFunction analyzer_transfer(const CombSpec& filter_comb, double spectral_shift,
                                   const FrequencyGrid& grid, double bin_separation,
                                   const SpectralPit& pit) {
  filter_comb.validate();
  const double delay = filter_comb.storage_time();
  require(std::abs(delay - bin_separation) <= 0.01 * bin_separation, ErrorKind::mismatched_delay,
          "analyzer delay " + std::to_string(delay) + " us does not match the bin separation " +
              std::to_string(bin_separation) + " us");
  CombSpec shifted = filter_comb;
  shifted.center_offset += spectral_shift;
  return single_pass_transfer(build_comb_profile(shifted, grid, pit));
}

CombSpec balance_analyzer(const CombSpec& filter_comb, const FrequencyGrid& grid,
                          const SpectralPit& pit, double reference_fwhm,
                          double reference_center) {
  filter_comb.validate();
  const double tau = filter_comb.storage_time();
  const auto pulse = make_gaussian_pulse(reference_fwhm, reference_center, 1.0, 0.0, grid);
  CombSpec comb = filter_comb;
  double transmitted = 0.0;
  double echo = 0.0;
  const auto imbalance = [&](double od) {
    comb.peak_od = od;
    const auto tf = single_pass_transfer(build_comb_profile(comb, grid, pit));
    const auto res = storage_efficiency(pulse, propagate(pulse, tf), tau, tau);
    transmitted = res.reflected_fraction;
    echo = res.efficiency;
    return transmitted - echo;
  };
  require(imbalance(kMaxFilterOd) < 0.0, ErrorKind::no_balance_found,
          "echo never outweighs transmission for peak OD up to 10");
  const double od = find_root(imbalance, 1e-9, kMaxFilterOd, 1e-9);
  imbalance(od);
  require(std::abs(transmitted - echo) < 0.005 * transmitted, ErrorKind::no_balance_found,
          "analyzer balance did not converge");
  return comb;
}

FringeFit fit_fringe(const std::vector<double>& phases, const std::vector<double>& p,
                     const std::vector<double>& std_error) {
  require(phases.size() == p.size(), ErrorKind::invalid_argument,
          "phase and probability lists differ in length");
  require(std_error.empty() || std_error.size() == p.size(), ErrorKind::invalid_argument,
          "std_error list length does not match");
  require(distinct_phases(phases) >= 3, ErrorKind::fit_singular,
          "fringe fit needs at least 3 distinct phases");
  const std::size_t n = p.size();
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n && !std_error.empty(); ++i) {
    require(std_error[i] > 0.0, ErrorKind::invalid_argument, "std_error entries must be positive");
    w[i] = 1.0 / (std_error[i] * std_error[i]);
  }

  Mat3 ata{};
  std::array<double, 3> atb{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<double, 3> x{1.0, std::cos(phases[i]), std::sin(phases[i])};
    for (int r = 0; r < 3; ++r) {
      atb[r] += w[i] * x[r] * p[i];
      for (int c = 0; c < 3; ++c) ata[r][c] += w[i] * x[r] * x[c];
    }
  }
  const Mat3 cov0 = invert(ata);
  std::array<double, 3> c{};
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) c[r] += cov0[r][k] * atb[k];
  require(c[0] > 0.0, ErrorKind::fit_singular, "fitted fringe amplitude is not positive");

  FringeFit fit;
  const double rho = std::hypot(c[1], c[2]);
  fit.amplitude = c[0];
  fit.visibility = rho / c[0];
  fit.phase_offset = wrap_phase(std::atan2(-c[2], c[1]));

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p[i] - (c[0] + c[1] * std::cos(phases[i]) + c[2] * std::sin(phases[i]));
    rss += w[i] * r * r;
  }
  double s2 = 1.0;
  if (std_error.empty()) s2 = n > 3 ? rss / static_cast<double>(n - 3) : 0.0;
  if (rho > 0.0) {
    const std::array<double, 3> g{-fit.visibility / c[0], c[1] / (c[0] * rho),
                                  c[2] / (c[0] * rho)};
    double var = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) var += g[r] * cov0[r][k] * g[k];
    fit.visibility_sigma = std::sqrt(std::max(0.0, var * s2));
  }

  if (fit.visibility > 1.0) {
    // Refit on the boundary V = 1: for fixed phi0 the amplitude is linear.
    const auto best_amplitude = [&](double phi0, double* cost) {
      double su = 0.0;
      double suu = 0.0;
      double spp = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = 1.0 + std::cos(phases[i] + phi0);
        su += w[i] * p[i] * u;
        suu += w[i] * u * u;
        spp += w[i] * p[i] * p[i];
      }
      if (cost) *cost = suu > 0.0 ? spp - su * su / suu : spp;
      return suu > 0.0 ? su / suu : 0.0;
    };
    const auto neg_cost = [&](double phi0) {
      double cost = 0.0;
      best_amplitude(phi0, &cost);
      return -cost;
    };
    const auto best = golden_section_maximize(neg_cost, fit.phase_offset - std::numbers::pi / 2.0,
                                              fit.phase_offset + std::numbers::pi / 2.0, 1e-12);
    fit.phase_offset = wrap_phase(best.x);
    fit.amplitude = best_amplitude(best.x, nullptr);
    fit.visibility = 1.0;
    fit.bounded = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double model =
        fit.amplitude * (1.0 + fit.visibility * std::cos(phases[i] + fit.phase_offset));
    fit.max_residual = std::max(fit.max_residual, std::abs(p[i] - model) / fit.amplitude);
  }
  return fit;
}

FringeScan fringe_scan(const TimeBinQubit& q, const FringeSetup& setup,
                       const std::vector<double>& shifts) {
  q.validate();
  require(setup.window > 0.0 && setup.window <= q.bin_separation, ErrorKind::invalid_argument,
          "detection window must be positive and no wider than the bin separation");
  require(setup.memory_delay >= q.bin_separation + setup.window, ErrorKind::invalid_argument,
          "memory storage time must be at least bin separation + window");
  const auto& grid = setup.memory.grid;
  const auto qubit = make_timebin_qubit(q, grid, setup.early_time);
  const auto stored = propagate(qubit, setup.memory);
  const double center = setup.early_time + setup.memory_delay + q.bin_separation;

  FringeScan scan;
  scan.phases.resize(shifts.size());
  scan.p_detect.resize(shifts.size());
  scan.std_error.assign(shifts.size(), 0.0);
  parallel_for(shifts.size(), [&](std::size_t i) {
    const auto tf = analyzer_transfer(setup.filter_comb, shifts[i], grid, q.bin_separation,
                                      setup.filter_pit);
    const auto out = propagate(stored, tf);
    scan.phases[i] = analyzer_phase(shifts[i], setup.filter_comb.tooth_spacing);
    scan.p_detect[i] = window_energy(out, center - setup.window / 2.0, center + setup.window / 2.0);
  });
  scan.fit = fit_fringe(scan.phases, scan.p_detect);
  return scan;
}

double pole_fidelity_from_energies(double correct, double wrong, double noise) {
  require(correct >= 0.0 && wrong >= 0.0 && noise >= 0.0, ErrorKind::invalid_argument,
          "bin energies and noise must be >= 0");
  const double total = correct + wrong + 2.0 * noise;
  require(total > 0.0, ErrorKind::invalid_argument, "no photons in either bin");
  return (correct + noise) / total;
}

double pole_fidelity(const TimeBinQubit& q, const TransferFunction& memory, double memory_delay,
                     double early_time, double window, double noise) {
  require(window > 0.0 && window <= q.bin_separation, ErrorKind::invalid_argument,
          "detection window must be positive and no wider than the bin separation");
  const double te = early_time + memory_delay;
  const double tl = te + q.bin_separation;
  double sum = 0.0;
  for (bool early : {true, false}) {
    TimeBinQubit pole = early ? TimeBinQubit::early() : TimeBinQubit::late();
    pole.bin_separation = q.bin_separation;
    pole.pulse_fwhm = q.pulse_fwhm;
    pole.mu_in = q.mu_in;
    const auto out = propagate(make_timebin_qubit(pole, memory.grid, early_time), memory);
    const double e = window_energy(out, te - window / 2.0, te + window / 2.0);
    const double l = window_energy(out, tl - window / 2.0, tl + window / 2.0);
    sum += early ? pole_fidelity_from_energies(e, l, noise)
                 : pole_fidelity_from_energies(l, e, noise);
  }
  return sum / 2.0;
}

FidelityReport fidelity_report(double v_coh, double f_pole, double mu_in, double efficiency) {
  require(std::isfinite(v_coh) && v_coh >= 0.0 && v_coh <= 1.0, ErrorKind::invalid_argument,
          "visibility must lie in [0, 1]");
  require(std::isfinite(f_pole) && f_pole >= 0.0 && f_pole <= 1.0, ErrorKind::invalid_argument,
          "pole fidelity must lie in [0, 1]");
  FidelityReport r;
  r.v_coh = v_coh;
  r.f_coh = (1.0 + v_coh) / 2.0;
  r.f_pole = f_pole;
  r.f_total = 2.0 / 3.0 * r.f_coh + 1.0 / 3.0 * f_pole;
  r.f_threshold = wcs_threshold(mu_in, efficiency);
  r.passes_quantum_bound = r.f_total > r.f_threshold;
  return r;
}

double wcs_threshold(double mu, double efficiency) {
  require(std::isfinite(mu) && mu > 0.0, ErrorKind::invalid_argument,
          "invalid-range: mu must be positive");
  require(std::isfinite(efficiency) && efficiency > 0.0 && efficiency <= 1.0,
          ErrorKind::invalid_argument, "invalid-range: efficiency must lie in (0, 1]");

  // Terms beyond n_max are below 1e-300 of the distribution.
  const int n_max = static_cast<int>(std::ceil(mu + 40.0 * std::sqrt(mu) + 60.0));
  std::vector<double> pmf(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) pmf[static_cast<std::size_t>(n)] = std::exp(poisson_log_pmf(mu, n));
  // Tails summed from the top, so small-mu tails keep full relative precision.
  std::vector<double> tail(pmf.size() + 1, 0.0);
  std::vector<double> weighted(pmf.size() + 1, 0.0);
  for (int n = n_max; n >= 0; --n) {
    const auto k = static_cast<std::size_t>(n);
    tail[k] = tail[k + 1] + pmf[k];
    weighted[k] = weighted[k + 1] + pmf[k] * (n + 1.0) / (n + 2.0);
  }
  const double budget = efficiency * -std::expm1(-mu);
  std::size_t n_min = 1;
  while (n_min < pmf.size() && tail[n_min] > budget * (1.0 + 1e-12)) ++n_min;
  require(n_min < pmf.size() && tail[n_min] > 0.0, ErrorKind::invalid_argument,
          "invalid-range: efficiency too small for the photon-number cutoff");
  return weighted[n_min] / tail[n_min];
}

}  // namespace afcsim
