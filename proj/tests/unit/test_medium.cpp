#include <doctest.h>

#include <numbers>

#include "afcsim/error.hpp"
#include "afcsim/medium.hpp"
#include "oracles.hpp"

using namespace afcsim;

namespace {

FrequencyGrid grid64() { return {0.0, 64.0, 1 << 16}; }

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected afcsim::Error");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("tooth area factors") {
  CHECK(tooth_area_factor(ToothShape::square) == 1.0);
  CHECK(tooth_area_factor(ToothShape::gaussian) == doctest::Approx(1.0645).epsilon(1e-4));
  CHECK(peak_od_for_effective_depth(ToothShape::square, 10.0, 0.4) == doctest::Approx(4.0));
}

TEST_CASE("rendered comb reproduces the requested effective depth") {
  for (auto shape : {ToothShape::square, ToothShape::gaussian}) {
    for (double F : {2.0, 5.8, 10.0}) {
      CombSpec c;
      c.shape = shape;
      c.finesse = F;
      c.peak_od = peak_od_for_effective_depth(shape, F, 0.4428);
      const auto p = build_comb_profile(c, grid64());
      CHECK(comb_effective_depth(p, c.tooth_spacing) == doctest::Approx(0.4428).epsilon(1e-3));
    }
  }
}

TEST_CASE("comb geometry: gap at the centre, teeth at half-integer spacings") {
  CombSpec c;
  c.finesse = 5.0;
  c.peak_od = 3.0;
  const auto g = grid64();
  const auto p = build_comb_profile(c, g, SpectralPit{18.0, 7.0});
  CHECK(p.od[g.index_of(0.0)] == 0.0);
  CHECK(p.od[g.index_of(0.25)] == doctest::Approx(3.0));
  CHECK(p.od[g.index_of(-0.25)] == doctest::Approx(3.0));
  CHECK(p.od[g.index_of(8.0)] == 0.0);   // inside pit, outside comb band
  CHECK(p.od[g.index_of(20.0)] == 7.0);  // outside the pit
}

TEST_CASE("background OD fills the comb band") {
  CombSpec c;
  c.peak_od = 1.0;
  c.background_od = 0.2;
  const auto g = grid64();
  const auto p = build_comb_profile(c, g);
  CHECK(p.od[g.index_of(0.0)] == doctest::Approx(0.2));
  CHECK(p.od[g.index_of(7.0)] == doctest::Approx(0.0));
}

TEST_CASE("comb validation errors") {
  CombSpec c;
  CHECK(kind_of([&] { build_comb_profile(c, {0.0, 64.0, 1 << 12}); }) == ErrorKind::grid_too_coarse);
  CHECK(kind_of([&] { build_comb_profile(c, {0.0, 32.0, 1 << 16}); }) ==
        ErrorKind::bandwidth_exceeds_grid);
  CHECK(kind_of([&] { build_comb_profile(c, grid64(), SpectralPit{10.0, 0.0}); }) ==
        ErrorKind::invalid_argument);
  c.finesse = 0.5;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::invalid_argument);
}

TEST_CASE("period must fit in the grid") {
  AbsorptionProfile p{{0.0, 1.0, 64}, std::vector<double>(64, 1.0)};
  CHECK(kind_of([&] { comb_effective_depth(p, 4.0); }) == ErrorKind::period_not_contained);
}

TEST_CASE("flat profile has zero phase") {
  AbsorptionProfile p{grid64(), std::vector<double>(1 << 16, 3.0)};
  for (double v : kramers_kronig_phase(p)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("lorentzian line matches the analytic causal phase") {
  const auto g = grid64();
  const double dp = 2.0;
  const double gamma = 0.3;
  AbsorptionProfile p{g, std::vector<double>(g.n_points)};
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double f = g.frequency(j);
    p.od[j] = dp * gamma * gamma / (gamma * gamma + f * f);
  }
  const auto phi = kramers_kronig_phase(p);
  double worst = 0.0;
  for (double f = -5.0; f <= 5.0; f += 0.05) {
    const std::size_t j = g.index_of(f);
    worst = std::max(worst, std::abs(phi[j] - oracle::lorentzian_phase(dp, gamma, g.frequency(j))));
  }
  // Tails beyond the grid carry residual phase ~ dp gamma / span.
  CHECK(worst < 2e-3);
}

TEST_CASE("kramers-kronig phase is linear in the profile") {
  const auto g = grid64();
  CombSpec a;
  a.peak_od = 1.5;
  CombSpec b;
  b.shape = ToothShape::gaussian;
  b.tooth_spacing = 0.25;
  b.finesse = 4.0;
  b.peak_od = 0.7;
  b.center_offset = 0.1;
  const auto pa = build_comb_profile(a, g);
  const auto pb = build_comb_profile(b, g);
  AbsorptionProfile sum{g, pa.od};
  for (std::size_t j = 0; j < g.n_points; ++j) sum.od[j] = 2.0 * pa.od[j] - 0.5 * pb.od[j];
  const auto fa = kramers_kronig_phase(pa);
  const auto fb = kramers_kronig_phase(pb);
  const auto fs = kramers_kronig_phase(sum);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n_points; ++j)
    worst = std::max(worst, std::abs(fs[j] - (2.0 * fa[j] - 0.5 * fb[j])));
  CHECK(worst < 1e-10);
}

TEST_CASE("transparent comb centre is slow light") {
  const auto g = grid64();
  CombSpec c;
  c.peak_od = 2.0;
  const auto tf = single_pass_transfer(build_comb_profile(c, g, SpectralPit{18.0, 10.0}));
  const auto phase = unwrapped_phase(tf);
  CHECK(group_delay(phase, g, g.index_of(0.0)) > 0.0);
  CHECK(std::abs(tf.values[g.index_of(0.0)]) == doctest::Approx(1.0));
}

TEST_CASE("pure delay transfer") {
  const auto g = grid64();
  const auto tf = TransferFunction::delay(g, 2.0);
  const auto phase = unwrapped_phase(tf);
  CHECK(group_delay(phase, g, 1000) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(tf.max_magnitude() == doctest::Approx(1.0));
}

TEST_CASE("non-finite OD is rejected") {
  AbsorptionProfile p{grid64(), std::vector<double>(1 << 16, 0.0)};
  p.od[3] = std::nan("");
  CHECK(kind_of([&] { kramers_kronig_phase(p); }) == ErrorKind::non_finite_value);
}
