#include <doctest.h>

#include <cmath>
#include <numbers>

#include "afcsim/error.hpp"
#include "afcsim/timebin.hpp"

using namespace afcsim;

namespace {

constexpr double kPi = std::numbers::pi;

FrequencyGrid grid64() { return {0.0, 64.0, 1 << 16}; }

CombSpec filter_template() {
  CombSpec c;
  c.tooth_spacing = 1.0;
  c.finesse = 8.0;
  c.bandwidth = 16.0;
  c.peak_od = 8.0;
  return c;
}

const CombSpec& balanced_filter() {
  static const CombSpec c =
      balance_analyzer(filter_template(), grid64(), SpectralPit{18.0, 0.0}, 0.25, 3.0);
  return c;
}

FringeSetup ideal_setup() {
  FringeSetup s;
  s.memory = TransferFunction::delay(grid64(), 2.0);
  s.memory_delay = 2.0;
  s.filter_comb = balanced_filter();
  s.filter_pit = {18.0, 0.0};
  return s;
}

std::vector<double> shifts(int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(static_cast<double>(k) / n);
  return out;
}

TimeBinQubit qubit(double delta) {
  auto q = TimeBinQubit::equator(delta);
  q.pulse_fwhm = 0.25;
  return q;
}

}  // namespace

TEST_CASE("qubit bins carry the stated photon numbers") {
  const auto g = grid64();
  auto q = TimeBinQubit::equator(0.0);
  q.pulse_fwhm = 0.25;
  const auto p = make_timebin_qubit(q, g, 3.0);
  // Resolved bins: the residual overlap term is exp(-11) of the energy.
  CHECK(window_energy(p, 2.5, 3.5) == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(window_energy(p, 3.5, 4.5) == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(p.energy() == doctest::Approx(0.25).epsilon(1e-4));
  // Overlapping 510 ns bins: in quadrature the cross term vanishes exactly.
  q = TimeBinQubit::equator(kPi / 2.0);
  CHECK(make_timebin_qubit(q, g, 3.0).energy() == doctest::Approx(0.25).epsilon(1e-12));

  auto e = TimeBinQubit::early();
  e.pulse_fwhm = 0.25;
  const auto pe = make_timebin_qubit(e, g, 3.0);
  CHECK(window_energy(pe, 3.5, 4.5) < 1e-6);
  CHECK(pe.energy() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("opposite phases are orthogonal in the late bin") {
  const auto g = grid64();
  auto a = make_timebin_qubit(qubit(0.0), g, 3.0);
  auto b = make_timebin_qubit(qubit(kPi), g, 3.0);
  Complex overlap = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    const double t = a.grid.time(n);
    if (t >= 3.5 && t < 4.5) overlap += std::conj(a.values[n]) * b.values[n];
  }
  CHECK(overlap.real() * a.grid.step == doctest::Approx(-0.125).epsilon(1e-6));
  double early_diff = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n)
    if (a.grid.time(n) < 3.1) early_diff = std::max(early_diff, std::abs(a.values[n] - b.values[n]));
  CHECK(early_diff < 1e-6);
}

TEST_CASE("qubit validation") {
  auto q = TimeBinQubit::equator(0.0);
  q.amp_early = 1.0;
  CHECK_THROWS_AS(q.validate(), Error);
  q = TimeBinQubit::equator(0.0);
  q.bin_separation = 0.4;
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("analyzer delay must match the bin separation") {
  auto c = filter_template();
  c.tooth_spacing = 0.9;
  try {
    analyzer_transfer(c, 0.0, grid64(), 1.0, SpectralPit{18.0, 0.0});
    FAIL("expected mismatched_delay");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::mismatched_delay);
  }
  CHECK(analyzer_phase(0.5, 1.0) == doctest::Approx(kPi));
}

TEST_CASE("balanced analyzer splits the pulse evenly") {
  const auto& c = balanced_filter();
  const auto tf = analyzer_transfer(c, 0.0, grid64(), 1.0, SpectralPit{18.0, 0.0});
  const auto p = make_gaussian_pulse(0.25, 3.0, 1.0, 0.0, grid64());
  const auto r = storage_efficiency(p, propagate(p, tf), 1.0, 1.0);
  CHECK(std::abs(r.reflected_fraction - r.efficiency) < 0.005 * r.reflected_fraction);
  CHECK(c.peak_od > 0.0);
  CHECK(c.peak_od < 10.0);
}

TEST_CASE("no balance with a too-shallow OD ceiling") {
  auto c = filter_template();
  c.finesse = 30.0;  // balance needs a peak OD near 30
  CHECK_THROWS_AS(balance_analyzer(c, grid64(), SpectralPit{18.0, 0.0}, 0.25, 3.0), Error);
}

TEST_CASE("fringe fit recovers synthetic parameters") {
  std::vector<double> ph;
  std::vector<double> p;
  for (int k = 0; k < 12; ++k) {
    ph.push_back(2.0 * kPi * k / 12.0);
    p.push_back(0.03 * (1.0 + 0.9 * std::cos(ph.back() + 0.4)));
  }
  const auto fit = fit_fringe(ph, p);
  CHECK(fit.amplitude == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(fit.visibility == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(fit.phase_offset == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(fit.max_residual < 1e-12);
  CHECK_FALSE(fit.bounded);
}

TEST_CASE("fringe fit needs three distinct phases") {
  try {
    fit_fringe({0.0, 2.0 * kPi, 1.0, 1.0 + 2.0 * kPi}, {1.0, 1.0, 2.0, 2.0});
    FAIL("expected fit_singular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::fit_singular);
  }
}

TEST_CASE("visibility above one is pinned to the boundary") {
  std::vector<double> ph;
  std::vector<double> p;
  for (int k = 0; k < 8; ++k) {
    ph.push_back(2.0 * kPi * k / 8.0);
    p.push_back(std::max(0.0, 1.0 + 1.05 * std::cos(ph.back() - 0.3)));
  }
  const auto fit = fit_fringe(ph, p);
  CHECK(fit.bounded);
  CHECK(fit.visibility == 1.0);
  CHECK(fit.phase_offset == doctest::Approx(-0.3).epsilon(0.02));
}

TEST_CASE("ideal memory: unit visibility, fringe law and phase covariance") {
  const auto setup = ideal_setup();
  const auto s0 = fringe_scan(qubit(0.0), setup, shifts(8));
  CHECK(s0.fit.visibility >= 0.999);
  CHECK(s0.fit.max_residual < 1e-4);
  for (double x : {kPi / 4.0, kPi / 2.0}) {
    const auto sx = fringe_scan(qubit(x), setup, shifts(8));
    CHECK(sx.fit.visibility >= 0.999);
    const double moved = std::remainder(sx.fit.phase_offset - s0.fit.phase_offset + x, 2.0 * kPi);
    CHECK(std::abs(moved) < 0.02);
  }
}

TEST_CASE("half-period shift is the fringe minimum and the fringe repeats") {
  const auto setup = ideal_setup();
  const auto s = fringe_scan(qubit(0.0), setup, {0.0, 0.5, 1.0, 0.25});
  CHECK(s.p_detect[1] < 1e-3 * s.p_detect[0]);
  CHECK(s.p_detect[2] == doctest::Approx(s.p_detect[0]).epsilon(1e-3));
}

TEST_CASE("pole fidelity") {
  const auto g = grid64();
  auto q = TimeBinQubit::equator(0.0);
  q.pulse_fwhm = 0.25;
  CHECK(pole_fidelity(q, TransferFunction::delay(g, 2.0), 2.0, 3.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(pole_fidelity_from_energies(1.0, 0.01) == doctest::Approx(0.990).epsilon(1e-3));
  CHECK(pole_fidelity(q, TransferFunction::delay(g, 2.0), 2.0, 3.0, 1.0, 0.01) < 1.0);
}

TEST_CASE("fidelity report algebra") {
  const auto r = fidelity_report(0.899, 0.946, 0.25, 0.51);
  CHECK(r.f_coh == (1.0 + 0.899) / 2.0);
  CHECK(r.f_total == 2.0 / 3.0 * r.f_coh + 1.0 / 3.0 * 0.946);
  CHECK(r.f_coh == doctest::Approx(0.9495).epsilon(1e-12));
  CHECK(r.f_total == doctest::Approx(0.9483).epsilon(1e-4));
  CHECK(r.passes_quantum_bound);
  CHECK(fidelity_report(1.0, 1.0, 0.25, 0.51).f_total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity_report(0.0, 1.0, 0.25, 0.51).f_coh == 0.5);
}

TEST_CASE("weak coherent state threshold") {
  CHECK(wcs_threshold(1e-8, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(wcs_threshold(0.25, 0.51) == doctest::Approx(0.75).epsilon(0.02 / 0.75));
  CHECK(wcs_threshold(0.25, 1.0) < wcs_threshold(0.25, 0.51));
  CHECK(wcs_threshold(0.5, 0.51) >= wcs_threshold(0.25, 0.51));
  CHECK_THROWS_AS(wcs_threshold(0.0, 0.5), Error);
  CHECK_THROWS_AS(wcs_threshold(0.25, 1.5), Error);
}
