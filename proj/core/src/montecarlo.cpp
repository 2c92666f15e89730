#include "afcsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "afcsim/error.hpp"
#include "afcsim/parallel.hpp"

namespace afcsim {
namespace {

constexpr std::uint64_t kShardTrials = 1u << 16;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Poisson draw of the total over n_trials, accumulated shard by shard.
std::uint64_t draw_counts(double mean_per_trial, std::uint64_t n_trials, std::uint64_t seed,
                          std::uint64_t tag, std::uint64_t stream, std::uint64_t bin) {
  if (mean_per_trial <= 0.0 || n_trials == 0) return 0;
  std::uint64_t total = 0;
  for (std::uint64_t shard = 0; shard * kShardTrials < n_trials; ++shard) {
    const std::uint64_t trials = std::min(kShardTrials, n_trials - shard * kShardTrials);
    std::mt19937_64 rng(stream_seed(seed, tag, stream, bin, shard));
    std::poisson_distribution<std::uint64_t> dist(mean_per_trial * static_cast<double>(trials));
    total += dist(rng);
  }
  return total;
}

void check_edges(const std::vector<double>& edges) {
  require(edges.size() >= 2, ErrorKind::invalid_argument, "histogram needs at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    require(std::isfinite(edges[i]) && edges[i] > edges[i - 1], ErrorKind::invalid_argument,
            "bin edges must be finite and strictly ascending");
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                          std::uint64_t d) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t w : {a, b, c, d}) h = splitmix64(h ^ splitmix64(w));
  return h;
}

void CountingConfig::validate() const {
  require(pulses_per_cycle > 0, ErrorKind::invalid_argument, "pulses_per_cycle must be positive");
  require(std::isfinite(cycle_rate) && cycle_rate > 0.0, ErrorKind::invalid_argument,
          "cycle_rate must be positive");
  require(std::isfinite(measurement_duration) && measurement_duration >= 0.0,
          ErrorKind::invalid_argument, "measurement_duration must be >= 0");
  require(std::isfinite(dark_rate) && dark_rate >= 0.0, ErrorKind::invalid_argument,
          "dark_rate must be >= 0");
  require(std::isfinite(detection_window) && detection_window > 0.0,
          ErrorKind::invalid_argument, "detection_window must be positive");
  require(std::isfinite(reference_reflectivity) && reference_reflectivity > 0.0 &&
              reference_reflectivity <= 1.0,
          ErrorKind::invalid_argument, "reference_reflectivity must lie in (0, 1]");
  require(std::isfinite(detector_efficiency) && detector_efficiency >= 0.0 &&
              detector_efficiency <= 1.0,
          ErrorKind::invalid_argument, "detector_efficiency must lie in [0, 1]");
}

std::uint64_t CountingConfig::trials_per_histogram() const {
  const auto cycles = static_cast<std::uint64_t>(std::floor(measurement_duration * cycle_rate + 1e-9));
  return cycles / 2 * pulses_per_cycle;
}

std::vector<double> uniform_edges(double t_lo, double t_hi, double width) {
  require(std::isfinite(t_lo) && std::isfinite(t_hi) && t_hi > t_lo && width > 0.0,
          ErrorKind::invalid_argument, "bin range must be finite and non-empty");
  const auto n = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / width - 1e-9));
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = t_lo + width * static_cast<double>(i);
  return edges;
}

SignalTrace signal_from_trace(const PulseEnvelope& pulse, const std::vector<double>& bin_edges) {
  check_edges(bin_edges);
  SignalTrace s{bin_edges, std::vector<double>(bin_edges.size() - 1)};
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i)
    s.mean_photons[i] = window_energy(pulse, bin_edges[i], bin_edges[i + 1]);
  return s;
}

CountHistogram run_counting(const SignalTrace& signal, const CountingConfig& cfg,
                            HistogramTag tag, std::uint64_t n_trials, std::uint64_t stream) {
  cfg.validate();
  check_edges(signal.bin_edges);
  require(signal.mean_photons.size() + 1 == signal.bin_edges.size(), ErrorKind::invalid_argument,
          "signal needs one photon number per bin");
  for (double m : signal.mean_photons)
    require(std::isfinite(m) && m >= 0.0, ErrorKind::invalid_argument,
            "mean photon numbers must be finite and >= 0");

  CountHistogram h{signal.bin_edges, std::vector<std::uint64_t>(signal.mean_photons.size()),
                   n_trials, tag};
  parallel_for(h.counts.size(), [&](std::size_t i) {
    const double width = signal.bin_edges[i + 1] - signal.bin_edges[i];
    const double mean =
        signal.mean_photons[i] * cfg.detector_efficiency + cfg.dark_per_trial(width);
    h.counts[i] = draw_counts(mean, n_trials, cfg.rng_seed, static_cast<std::uint64_t>(tag),
                              stream, i);
  });
  return h;
}

std::uint64_t window_counts(const CountHistogram& h, const TimeWindow& w) {
  const auto& e = h.bin_edges;
  const double tol = 1e-9 * std::max(1.0, std::abs(e.back()));
  const auto on_edge = [&](double t) {
    return std::any_of(e.begin(), e.end(), [&](double x) { return std::abs(x - t) <= tol; });
  };
  require(w.hi > w.lo && on_edge(w.lo) && on_edge(w.hi), ErrorKind::invalid_argument,
          "window [" + std::to_string(w.lo) + ", " + std::to_string(w.hi) +
              ") does not align with histogram bin edges");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    if (e[i] >= w.lo - tol && e[i + 1] <= w.hi + tol) sum += h.counts[i];
  return sum;
}

EfficiencyEstimate estimate_efficiency(const CountHistogram& reference,
                                       const CountHistogram& memory, const CountingConfig& cfg,
                                       const TimeWindow& input_window,
                                       const TimeWindow& echo_window) {
  cfg.validate();
  require(reference.n_trials > 0 && memory.n_trials > 0, ErrorKind::zero_reference_counts,
          "histograms hold no trials");
  const double nr = static_cast<double>(reference.n_trials);
  const double nm = static_cast<double>(memory.n_trials);
  const double r_counts = static_cast<double>(window_counts(reference, input_window));
  const double e_counts = static_cast<double>(window_counts(memory, echo_window));
  require(r_counts > 0.0, ErrorKind::zero_reference_counts, "no counts in the reference window");

  const double r = r_counts / nr - cfg.dark_per_trial(input_window.hi - input_window.lo);
  const double e = e_counts / nm - cfg.dark_per_trial(echo_window.hi - echo_window.lo);
  require(r > 0.0, ErrorKind::zero_reference_counts,
          "reference counts do not exceed the dark-count expectation");
  const double rho = cfg.reference_reflectivity;
  const double var_r = r_counts / (nr * nr);
  const double var_e = e_counts / (nm * nm);

  EfficiencyEstimate est;
  est.eta = e * rho / r;
  est.sigma = std::sqrt(var_e * (rho / r) * (rho / r) + var_r * (est.eta / r) * (est.eta / r));
  est.n_trials = memory.n_trials;
  est.seed = cfg.rng_seed;
  return est;
}

FringeScan fringe_counts(const FringeScan& noiseless, const CountingConfig& cfg,
                         std::uint64_t trials_per_point, bool sample, std::uint64_t stream) {
  cfg.validate();
  require(trials_per_point > 0, ErrorKind::invalid_argument, "trials_per_point must be positive");
  require(noiseless.phases.size() == noiseless.p_detect.size(), ErrorKind::invalid_argument,
          "fringe scan phase and probability lists differ in length");
  const double trials = static_cast<double>(trials_per_point);
  FringeScan out;
  out.phases = noiseless.phases;
  out.p_detect.resize(noiseless.p_detect.size());
  out.std_error.resize(noiseless.p_detect.size());
  for (std::size_t i = 0; i < out.p_detect.size(); ++i) {
    const double mean = noiseless.p_detect[i] * cfg.detector_efficiency +
                        cfg.dark_per_trial(cfg.detection_window);
    if (sample) {
      const auto k = static_cast<double>(
          draw_counts(mean, trials_per_point, cfg.rng_seed,
                      static_cast<std::uint64_t>(HistogramTag::fringe_point), stream, i));
      out.p_detect[i] = k / trials;
      out.std_error[i] = std::sqrt(std::max(k, 1.0)) / trials;
    } else {
      out.p_detect[i] = mean;
      out.std_error[i] = std::sqrt(std::max(mean, 1.0 / trials) / trials);
    }
  }
  out.fit = fit_fringe(out.phases, out.p_detect, out.std_error);
  return out;
}

}  // namespace afcsim
