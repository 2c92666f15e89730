#include "afcsim/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "afcsim/error.hpp"
#include "afcsim/optimize.hpp"

namespace afcsim {
namespace {

constexpr double kMaxDepth = 5.0;

}  // namespace

void EfficiencyModel::validate() const {
  require(std::isfinite(d_tilde) && d_tilde >= 0.0, ErrorKind::invalid_argument,
          "d_tilde must be >= 0");
  require(std::isfinite(r_out) && r_out >= 0.0 && r_out <= 1.0, ErrorKind::invalid_argument,
          "r_out must lie in [0, 1]");
  require(std::isfinite(loss) && loss >= 0.0 && loss < 1.0, ErrorKind::invalid_argument,
          "loss must lie in [0, 1)");
  require(finesse >= 1.0, ErrorKind::invalid_argument, "comb finesse must be >= 1");
  require(std::isfinite(background_od) && background_od >= 0.0, ErrorKind::invalid_argument,
          "background_od must be >= 0");
}

double eta_dephasing(double finesse, ToothShape shape) {
  require(finesse >= 1.0, ErrorKind::invalid_argument, "comb finesse must be >= 1");
  if (std::isinf(finesse)) return 1.0;
  switch (shape) {
    case ToothShape::square: {
      const double x = std::numbers::pi / finesse;
      const double s = std::sin(x) / x;
      return s * s;
    }
    case ToothShape::gaussian: return std::exp(-7.0 / (finesse * finesse));
  }
  return 1.0;
}

double eta_cavity(const EfficiencyModel& m) {
  m.validate();
  const double r = (m.r_out - m.loss) * std::exp(-2.0 * m.background_od);
  require(r >= 0.0, ErrorKind::unmatched_configuration,
          "loss exceeds the back-mirror reflectivity (R_out - eps = " +
              std::to_string(m.r_out - m.loss) + ")");
  const double d = m.d_tilde;
  const double a = std::exp(-2.0 * d);
  const double denom = 1.0 - r * a;
  if (denom == 0.0) return 0.0;  // d = 0 with a lossless mirror: no absorption
  return 4.0 * d * d * a * r * eta_dephasing(m.finesse, m.shape) / (denom * denom);
}

double eta_cavity_general(double r_in, const EfficiencyModel& m) {
  m.validate();
  require(std::isfinite(r_in) && r_in >= 0.0 && r_in <= 1.0, ErrorKind::invalid_argument,
          "r_in must lie in [0, 1]");
  const double d = m.d_tilde;
  const double t = 1.0 - m.loss;
  const double denom = 1.0 - std::sqrt(r_in * m.r_out * t) * std::exp(-d);
  if (denom == 0.0) return 0.0;
  const double d2 = denom * denom;
  return 4.0 * d * d * eta_dephasing(m.finesse, m.shape) * t * std::exp(-2.0 * d) * m.r_out *
         (1.0 - r_in) * (1.0 - r_in) / (d2 * d2);
}

double eta_forward(double d_tilde, double eta_deph, double background_od) {
  require(std::isfinite(d_tilde) && d_tilde >= 0.0, ErrorKind::invalid_argument,
          "d_tilde must be >= 0");
  return d_tilde * d_tilde * std::exp(-d_tilde) * eta_deph * std::exp(-background_od);
}

double impedance_matched_depth(double r_in, double r_out, double loss) {
  require(std::isfinite(r_in) && r_in > 0.0 && r_in <= 1.0, ErrorKind::invalid_argument,
          "r_in must lie in (0, 1]");
  require(std::isfinite(r_out) && r_out <= 1.0 && std::isfinite(loss) && loss >= 0.0,
          ErrorKind::invalid_argument, "r_out must be <= 1 and loss >= 0");
  const double effective = r_out - loss;
  require(r_in <= effective, ErrorKind::unmatched_configuration,
          "r_in = " + std::to_string(r_in) + " exceeds R_out - eps = " +
              std::to_string(effective) + "; no absorber depth can match the cavity");
  return 0.5 * std::log(effective / r_in);
}

DepthOptimum optimize_depth(double r_out, double loss, double finesse, ToothShape shape,
                            double background_od) {
  EfficiencyModel m{0.0, r_out, loss, finesse, shape, background_od};
  m.validate();
  if (r_out - loss <= 0.0) return {0.0, 0.0, true};
  const auto f = [&](double d) {
    m.d_tilde = d;
    return eta_cavity(m);
  };
  const auto best = golden_section_maximize(f, 0.0, kMaxDepth, 1e-10);
  return {best.x, best.value, best.value <= 0.0};
}

DepthOptimum optimize_forward_depth(double eta_deph, double background_od) {
  const auto f = [&](double d) { return eta_forward(d, eta_deph, background_od); };
  const auto best = golden_section_maximize(f, 0.0, kMaxDepth, 1e-10);
  return {best.x, best.value, best.value <= 0.0};
}

DecayFit fit_decay(std::span<const DecayPoint> points) {
  require(points.size() >= 2, ErrorKind::degenerate_fit, "decay fit needs at least 2 points");
  double st = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    require(std::isfinite(p.efficiency) && p.efficiency > 0.0,
            ErrorKind::nonpositive_efficiency,
            "efficiency at tau = " + std::to_string(p.storage_time) + " us is not positive");
    require(std::isfinite(p.storage_time), ErrorKind::invalid_argument,
            "storage time must be finite");
    st += p.storage_time;
    sy += std::log(p.efficiency);
  }
  const auto n = static_cast<double>(points.size());
  const double mt = st / n;
  const double my = sy / n;
  double stt = 0.0;
  double sty = 0.0;
  for (const auto& p : points) {
    const double dt = p.storage_time - mt;
    stt += dt * dt;
    sty += dt * (std::log(p.efficiency) - my);
  }
  require(stt > 0.0, ErrorKind::degenerate_fit, "all points share the same storage time");
  const double slope = sty / stt;
  require(slope < 0.0, ErrorKind::degenerate_fit, "efficiency does not decay with storage time");
  const double intercept = my - slope * mt;
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = std::log(p.efficiency) - (intercept + slope * p.storage_time);
    rss += r * r;
  }
  return {std::exp(intercept), -4.0 / slope, std::sqrt(rss)};
}

double decay_model(const DecayFit& fit, double storage_time) {
  return fit.eta0 * std::exp(-4.0 * storage_time / fit.t2_eff);
}

}  // namespace afcsim
