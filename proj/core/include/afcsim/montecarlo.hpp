#pragma once

#include <cstdint>
#include <vector>

#include "afcsim/propagation.hpp"
#include "afcsim/timebin.hpp"

namespace afcsim {

/// Photon-counting protocol. Reference (blocked cavity) and memory cycles
/// alternate, so each histogram gets half of the cycles.
struct CountingConfig {
  std::uint64_t pulses_per_cycle = 1000;
  double cycle_rate = 1.0;             // Hz
  double measurement_duration = 120.0; // s
  double dark_rate = 25.0;             // Hz
  double detection_window = 2.0;       // us
  double reference_reflectivity = 0.4;
  double detector_efficiency = 1.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
  /// Trials per histogram: half the cycles in the run, times pulses per cycle.
  std::uint64_t trials_per_histogram() const;
  /// Expected dark counts per trial in a window of the given width (us).
  double dark_per_trial(double width) const { return dark_rate * width * 1e-6; }
};

enum class HistogramTag { reference, memory, fringe_point };

struct CountHistogram {
  std::vector<double> bin_edges;  // us, ascending
  std::vector<std::uint64_t> counts;
  std::uint64_t n_trials = 0;
  HistogramTag tag = HistogramTag::memory;
};

/// Mean photon number per trial arriving in each time bin.
struct SignalTrace {
  std::vector<double> bin_edges;  // us, ascending
  std::vector<double> mean_photons;
};

/// Integrates |E|^2 of a trace into the given bins.
SignalTrace signal_from_trace(const PulseEnvelope& pulse, const std::vector<double>& bin_edges);

/// Uniform bins of `width` us covering [t_lo, t_hi).
std::vector<double> uniform_edges(double t_lo, double t_hi, double width);

/// Counts per bin over n_trials: Poisson with mean n_trials * (photons *
/// detector efficiency + dark rate * bin width). Trials are split into shards,
/// each drawn from its own stream keyed by (seed, tag, stream, bin, shard), so
/// results do not depend on the thread count.
CountHistogram run_counting(const SignalTrace& signal, const CountingConfig& cfg,
                            HistogramTag tag, std::uint64_t n_trials, std::uint64_t stream = 0);

struct TimeWindow {
  double lo = 0.0;  // us
  double hi = 0.0;
};

/// Counts in the bins lying inside the window. Window edges must fall on bin edges.
std::uint64_t window_counts(const CountHistogram& h, const TimeWindow& w);

struct EfficiencyEstimate {
  double eta = 0.0;
  double sigma = 0.0;
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
};

/// Dark-subtracted echo rate over dark-subtracted reference rate / reflectivity,
/// with Poisson errors propagated to first order.
EfficiencyEstimate estimate_efficiency(const CountHistogram& reference,
                                       const CountHistogram& memory, const CountingConfig& cfg,
                                       const TimeWindow& input_window,
                                       const TimeWindow& echo_window);

/// Poisson-sampled detection probability per phase point (detector efficiency
/// and dark counts in cfg.detection_window included), refitted with weights.
/// With sample = false the expected values are returned instead.
FringeScan fringe_counts(const FringeScan& noiseless, const CountingConfig& cfg,
                         std::uint64_t trials_per_point, bool sample = true,
                         std::uint64_t stream = 0);

/// 64-bit seed for an independent stream: SplitMix64 over the key words.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0, std::uint64_t d = 0);

}  // namespace afcsim
