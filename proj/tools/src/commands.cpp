#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "afcsim/analytics.hpp"
#include "afcsim/error.hpp"
#include "afcsim/montecarlo.hpp"
#include "output.hpp"

namespace afcsim::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Paths = std::vector<fs::path>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kLinewidthPoints = 1 << 15;

std::string degree_label(double deg) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, deg);
  return std::string(buf, res.ptr) + "deg";
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

CountingConfig make_counting(const RunConfig& cfg, double window) {
  const auto& m = cfg.montecarlo;
  CountingConfig c;
  c.pulses_per_cycle = m.pulses_per_cycle;
  c.cycle_rate = m.cycle_rate;
  c.measurement_duration = m.duration;
  c.dark_rate = m.dark_rate;
  c.detection_window = window;
  c.reference_reflectivity = m.reference_reflectivity;
  c.detector_efficiency = m.detector_efficiency;
  c.rng_seed = m.seed;
  c.validate();
  return c;
}

// ---- storage ---------------------------------------------------------------

struct StorageRun {
  StorageSetup setup;
  PulseEnvelope input;
  StorageResult result;
};

StorageRun storage_run(const RunConfig& cfg) {
  StorageRun run{make_storage_setup(cfg), {}, {}};
  const auto& s = run.setup;
  run.input = make_gaussian_pulse(s.pulse_fwhm, s.pulse_center, s.mu_in, 0.0, s.grid);
  run.result = storage_efficiency(run.input, propagate(run.input, memory_transfer(s)),
                                  s.comb.storage_time(), s.window);
  return run;
}

Paths cmd_storage(const RunConfig& cfg, const fs::path& out) {
  const auto run = storage_run(cfg);
  const auto& res = run.result;
  const auto& s = run.setup;
  const double tau = s.comb.storage_time();
  const double t_end = std::min(res.output_trace.grid.time(res.output_trace.grid.n_points - 1),
                                s.pulse_center + 3.0 * tau + s.window);

  CsvTable trace({"time_us", "intensity"});
  const auto& g = res.output_trace.grid;
  for (std::size_t n = 0; n < g.n_points && g.time(n) <= t_end; ++n)
    trace.add_row({g.time(n), std::norm(res.output_trace.values[n])});

  const auto profile = build_comb_profile(s.comb, s.grid, s.pit);
  const double d_eff = comb_effective_depth(profile, s.comb.tooth_spacing);
  Json summary;
  summary["eta"] = res.efficiency;
  summary["reflected_fraction"] = res.reflected_fraction;
  summary["echo_time_us"] = res.echo_times.empty() ? Json(nullptr) : Json(res.echo_times.front());
  summary["input_time_us"] = res.input_time;
  summary["storage_time_us"] = tau;
  summary["mu_in"] = s.mu_in;
  summary["effective_depth"] = d_eff;
  summary["impedance_mismatch"] =
      s.use_cavity ? Json(check_impedance(s.cavity.r_in, s.cavity.r_out, s.cavity.round_trip_loss,
                                          d_eff))
                   : Json(nullptr);
  summary["window_energies"] = res.window_energies;

  const Paths paths{out / "storage_trace.csv", out / "storage_summary.json"};
  write_csv(paths[0], trace);
  write_json(paths[1], summary);
  return paths;
}

// ---- scans -----------------------------------------------------------------

struct WindowEstimate {
  double eta = kNaN;
  double sigma = kNaN;
};

// Counting emulation on window-integrated photon numbers: reference cycles see
// mu * reflectivity in the input window, memory cycles see mu * eta in the echo window.
WindowEstimate estimate_from_windows(const RunConfig& cfg, double mu, double eta, double tau,
                                     std::uint64_t stream) {
  const auto cc = make_counting(cfg, cfg.pulse.window);
  const double t0 = cfg.pulse.center;
  const double w = cfg.pulse.window;
  const TimeWindow in{t0 - w / 2.0, t0 + w / 2.0};
  const TimeWindow echo{t0 + tau - w / 2.0, t0 + tau + w / 2.0};
  SignalTrace ref;
  SignalTrace mem;
  if (echo.lo > in.hi) {
    ref.bin_edges = {in.lo, in.hi, echo.lo, echo.hi};
    ref.mean_photons = {mu * cc.reference_reflectivity, 0.0, 0.0};
    mem.mean_photons = {0.0, 0.0, mu * eta};
  } else {
    ref.bin_edges = {in.lo, in.hi, echo.hi};
    ref.mean_photons = {mu * cc.reference_reflectivity, 0.0};
    mem.mean_photons = {0.0, mu * eta};
  }
  mem.bin_edges = ref.bin_edges;
  const auto n = cc.trials_per_histogram();
  const auto h_ref = run_counting(ref, cc, HistogramTag::reference, n, stream);
  const auto h_mem = run_counting(mem, cc, HistogramTag::memory, n, stream);
  const auto est = estimate_efficiency(h_ref, h_mem, cc, in, echo);
  return {est.eta, est.sigma};
}

Json estimates_json(const RunConfig& cfg, const std::vector<WindowEstimate>& est,
                    const std::vector<double>& x, const std::string& x_name) {
  const auto n = make_counting(cfg, cfg.pulse.window).trials_per_histogram();
  Json doc;
  doc["source"] = to_string(cfg.montecarlo.source);
  doc["n_trials"] = n;
  doc["seed"] = cfg.montecarlo.seed;
  doc["estimates"] = Json::array();
  for (std::size_t i = 0; i < est.size(); ++i) {
    Json e;
    e[x_name] = x[i];
    e["eta"] = number_or_null(est[i].eta);
    e["sigma"] = number_or_null(est[i].sigma);
    e["n_trials"] = n;
    e["seed"] = cfg.montecarlo.seed;
    doc["estimates"].push_back(e);
  }
  return doc;
}

Paths cmd_scan_storage_time(const RunConfig& cfg, const fs::path& out, bool counting) {
  const auto setup = make_storage_setup(cfg);
  const auto pts = scan_storage_time(setup, cfg.scan.storage_times, cfg.scan.t2_eff,
                                     cfg.scan.match_depth);

  std::vector<DecayPoint> decay;
  for (const auto& p : pts) decay.push_back({p.storage_time, p.eta_cavity});
  Json fit_doc;
  DecayFit fit;
  bool fitted = false;
  try {
    fit = fit_decay(decay);
    fitted = true;
  } catch (const Error& e) {
    fit_doc["reason"] = std::string(to_string(e.kind()));
  }
  fit_doc["fitted"] = fitted;
  fit_doc["eta0"] = fitted ? Json(fit.eta0) : Json(nullptr);
  fit_doc["t2_eff_us"] = fitted ? Json(fit.t2_eff) : Json(nullptr);
  fit_doc["residual_norm"] = fitted ? Json(fit.residual_norm) : Json(nullptr);

  std::vector<std::string> header{"tau_us", "eta_cavity", "eta_single_pass", "eta_fit",
                                  "effective_depth", "grid_points"};
  std::vector<WindowEstimate> est;
  if (counting) {
    header.insert(header.end(), {"eta_mc", "sigma_mc"});
    for (std::size_t i = 0; i < pts.size(); ++i)
      est.push_back(estimate_from_windows(cfg, setup.mu_in, pts[i].eta_cavity,
                                          pts[i].storage_time, i));
  }
  CsvTable table(header);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    std::vector<double> row{p.storage_time, p.eta_cavity, p.eta_single_pass,
                            fitted ? decay_model(fit, p.storage_time) : kNaN, p.effective_depth,
                            static_cast<double>(p.grid_points)};
    if (counting) row.insert(row.end(), {est[i].eta, est[i].sigma});
    table.add_row(row);
  }

  if (counting) {
    std::vector<double> taus;
    for (const auto& p : pts) taus.push_back(p.storage_time);
    const Paths paths{out / "montecarlo_scan_storage_time.csv", out / "montecarlo_estimates.json"};
    write_csv(paths[0], table);
    write_json(paths[1], estimates_json(cfg, est, taus, "tau_us"));
    return paths;
  }
  const Paths paths{out / "scan_storage_time.csv", out / "scan_storage_time_fit.json"};
  write_csv(paths[0], table);
  write_json(paths[1], fit_doc);
  return paths;
}

Paths cmd_scan_bandwidth(const RunConfig& cfg, const fs::path& out, bool counting) {
  const auto setup = make_storage_setup(cfg);
  const auto pts = scan_bandwidth(setup, cfg.scan.pulse_fwhms, cfg.scan.reference_fwhm);
  const double tau = setup.comb.storage_time();

  std::vector<std::string> header{"bandwidth_MHz", "eta", "pulse_fwhm_us", "mu_in",
                                  "reflected_fraction"};
  std::vector<WindowEstimate> est;
  if (counting) {
    header.insert(header.end(), {"eta_mc", "sigma_mc"});
    for (std::size_t i = 0; i < pts.size(); ++i)
      est.push_back(estimate_from_windows(cfg, pts[i].mu_in, pts[i].efficiency, tau, i));
  }
  CsvTable table(header);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    std::vector<double> row{p.bandwidth, p.efficiency, p.pulse_fwhm, p.mu_in,
                            p.reflected_fraction};
    if (counting) row.insert(row.end(), {est[i].eta, est[i].sigma});
    table.add_row(row);
  }
  if (counting) {
    std::vector<double> bws;
    for (const auto& p : pts) bws.push_back(p.bandwidth);
    const Paths paths{out / "montecarlo_scan_bandwidth.csv", out / "montecarlo_estimates.json"};
    write_csv(paths[0], table);
    write_json(paths[1], estimates_json(cfg, est, bws, "bandwidth_MHz"));
    return paths;
  }
  const Paths paths{out / "scan_bandwidth.csv"};
  write_csv(paths[0], table);
  return paths;
}

// ---- optimize-comb ---------------------------------------------------------

Paths cmd_optimize_comb(const RunConfig& cfg, const fs::path& out) {
  const auto& c = cfg.comb;
  const auto& cav = cfg.cavity;
  const auto opt = optimize_depth(cav.r_out, cav.loss, c.finesse, c.shape, c.background_od);
  const double r_in_star = (cav.r_out - cav.loss) * std::exp(-2.0 * (opt.d_tilde + c.background_od));

  Json doc;
  doc["d_tilde_star"] = opt.d_tilde;
  doc["eta_star"] = opt.efficiency;
  doc["eta_deph"] = eta_dephasing(c.finesse, c.shape);
  doc["matched_residual"] = check_impedance(cav.r_in, cav.r_out, cav.loss, opt.d_tilde);
  doc["r_in_matched"] = r_in_star;
  doc["peak_od_star"] = peak_od_for_effective_depth(c.shape, c.finesse, opt.d_tilde);
  doc["degenerate"] = opt.degenerate;
  doc["shape"] = to_string(c.shape);

  const Paths paths{out / "optimize_comb.json"};
  write_json(paths[0], doc);
  return paths;
}

// ---- qubit-fringe ----------------------------------------------------------

struct QubitRun {
  std::vector<double> phases_deg;
  std::vector<FringeScan> scans;
  double f_pole = 0.0;
  double eta_memory = 0.0;
};

QubitRun qubit_run(const RunConfig& cfg) {
  const auto& qc = cfg.qubit;
  const auto grid = make_grid(cfg);
  const auto setup = make_storage_setup(cfg);

  CombSpec filter;
  filter.tooth_spacing = qc.filter_tooth_spacing;
  filter.finesse = qc.filter_finesse;
  filter.shape = qc.filter_shape;
  filter.bandwidth = qc.filter_bandwidth;
  filter.peak_od = 1.0;
  const SpectralPit filter_pit{qc.filter_pit_width, 0.0};

  FringeSetup fs_setup;
  fs_setup.memory = memory_transfer(setup);
  fs_setup.memory_delay = setup.comb.storage_time();
  fs_setup.filter_comb = balance_analyzer(filter, grid, filter_pit, qc.pulse_fwhm, qc.early_time);
  fs_setup.filter_pit = filter_pit;
  fs_setup.early_time = qc.early_time;
  fs_setup.window = qc.window;

  std::vector<double> shifts;
  const auto n = qc.shifts_per_period;
  for (std::uint64_t k = 0; k < n; ++k)
    shifts.push_back(qc.filter_tooth_spacing * static_cast<double>(k) / static_cast<double>(n));

  QubitRun run;
  for (double deg : qc.phases_deg) {
    run.phases_deg.push_back(deg);
    run.scans.push_back(fringe_scan(make_qubit(cfg, deg * std::numbers::pi / 180.0), fs_setup, shifts));
  }
  run.f_pole = pole_fidelity(make_qubit(cfg, 0.0), fs_setup.memory, fs_setup.memory_delay,
                             qc.early_time, qc.window, qc.pole_noise);

  const auto probe = make_gaussian_pulse(qc.pulse_fwhm, qc.early_time, qc.mu_in, 0.0, grid);
  run.eta_memory = storage_efficiency(probe, propagate(probe, fs_setup.memory),
                                      fs_setup.memory_delay, cfg.pulse.window)
                       .efficiency;
  return run;
}

Json fidelity_json(const RunConfig& cfg, const QubitRun& run, const std::vector<FringeScan>& scans) {
  double v_sum = 0.0;
  double var_sum = 0.0;
  Json states = Json::array();
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const auto& f = scans[i].fit;
    v_sum += f.visibility;
    var_sum += f.visibility_sigma * f.visibility_sigma;
    Json s;
    s["phase_deg"] = run.phases_deg[i];
    s["visibility"] = f.visibility;
    s["visibility_sigma"] = f.visibility_sigma;
    s["phase_offset_rad"] = f.phase_offset;
    s["max_residual"] = f.max_residual;
    s["bounded"] = f.bounded;
    states.push_back(s);
  }
  const double n = static_cast<double>(scans.size());
  const double v_coh = v_sum / n;
  const auto rep = fidelity_report(v_coh, run.f_pole, cfg.qubit.mu_in, run.eta_memory);
  Json doc;
  doc["v_coh"] = rep.v_coh;
  doc["v_coh_sigma"] = std::sqrt(var_sum) / n;
  doc["f_coh"] = rep.f_coh;
  doc["f_pole"] = rep.f_pole;
  doc["f_total"] = rep.f_total;
  doc["f_threshold"] = rep.f_threshold;
  doc["passes_quantum_bound"] = rep.passes_quantum_bound;
  doc["mu_in"] = cfg.qubit.mu_in;
  doc["eta_memory"] = run.eta_memory;
  doc["states"] = states;
  return doc;
}

Paths write_fringes(const RunConfig& cfg, const fs::path& out, const QubitRun& run,
                    const std::vector<FringeScan>& scans, const std::string& prefix, bool counting) {
  Paths paths;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    std::vector<std::string> header{"phase_rad", "p_detect", "stderr"};
    if (counting) header.push_back("p_expected");
    CsvTable table(header);
    const auto& s = scans[i];
    for (std::size_t k = 0; k < s.phases.size(); ++k) {
      std::vector<double> row{s.phases[k], s.p_detect[k], s.std_error[k]};
      if (counting) row.push_back(run.scans[i].p_detect[k]);
      table.add_row(row);
    }
    paths.push_back(out / (prefix + "_" + degree_label(run.phases_deg[i]) + ".csv"));
    write_csv(paths.back(), table);
  }
  paths.push_back(out / (counting ? "montecarlo_fidelity.json" : "fidelity.json"));
  write_json(paths.back(), fidelity_json(cfg, run, scans));
  return paths;
}

Paths cmd_qubit_fringe(const RunConfig& cfg, const fs::path& out, bool counting) {
  const auto run = qubit_run(cfg);
  if (!counting) return write_fringes(cfg, out, run, run.scans, "qubit_fringe", false);
  const auto cc = make_counting(cfg, cfg.qubit.window);
  std::vector<FringeScan> sampled;
  for (std::size_t i = 0; i < run.scans.size(); ++i)
    sampled.push_back(fringe_counts(run.scans[i], cc, cfg.montecarlo.fringe_trials, true, i));
  return write_fringes(cfg, out, run, sampled, "montecarlo_fringe", true);
}

// ---- linewidth -------------------------------------------------------------

Paths cmd_linewidth(const RunConfig& cfg, const fs::path& out) {
  const auto cav = make_cavity(cfg);
  // Half a free spectral range holds one resonance with its full width.
  const FrequencyGrid grid{0.0, 0.5 / cav.round_trip_time, kLinewidthPoints};

  CombSpec empty = make_comb(cfg);
  empty.peak_od = 0.0;
  empty.background_od = 0.0;
  const auto loaded = single_pass_transfer(build_comb_profile(empty, grid, make_pit(cfg)));
  const auto bare = TransferFunction::constant(grid, Complex{1.0, 0.0});

  const auto rep = resonance_linewidth(cavity_transmission(loaded, cav), round_trip_phase(loaded, cav));
  const auto bare_rep = resonance_linewidth(cavity_transmission(bare, cav), round_trip_phase(bare, cav));

  Json doc;
  doc["fwhm_MHz"] = rep.fwhm;
  doc["group_delay_us"] = rep.group_delay_at_center;
  doc["effective_fsr_MHz"] = rep.effective_fsr;
  doc["resonance_MHz"] = rep.resonance_frequency;
  doc["bare_fwhm_MHz"] = bare_rep.fwhm;
  doc["bare_fsr_MHz"] = bare_rep.effective_fsr;
  doc["bare_finesse"] = bare_rep.effective_fsr / bare_rep.fwhm;
  doc["narrowing"] = bare_rep.fwhm / rep.fwhm;

  const Paths paths{out / "linewidth.json"};
  write_json(paths[0], doc);
  return paths;
}

// ---- montecarlo ------------------------------------------------------------

CsvTable histogram_table(const CountHistogram& h) {
  CsvTable t({"time_us", "counts", "counts_sigma"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double c = static_cast<double>(h.counts[i]);
    t.add_row({0.5 * (h.bin_edges[i] + h.bin_edges[i + 1]), c, std::sqrt(c)});
  }
  return t;
}

Paths cmd_montecarlo_storage(const RunConfig& cfg, const fs::path& out) {
  const auto run = storage_run(cfg);
  const auto& s = run.setup;
  const auto cc = make_counting(cfg, s.window);
  const double tau = s.comb.storage_time();
  const double t0 = s.pulse_center;
  const double w = s.window;
  const double bw = cfg.montecarlo.bin_width;

  const double first = t0 - w / 2.0;
  const double lo = first - std::floor(first / bw + 1e-9) * bw;
  const double t_end = run.input.grid.duration();
  const double hi = std::min(t0 + 2.0 * tau + w / 2.0, t_end);
  const auto edges = uniform_edges(lo, hi, bw);

  auto ref = signal_from_trace(run.input, edges);
  for (auto& m : ref.mean_photons) m *= cc.reference_reflectivity;
  const auto mem = signal_from_trace(run.result.output_trace, edges);

  const auto n = cc.trials_per_histogram();
  const auto h_ref = run_counting(ref, cc, HistogramTag::reference, n);
  const auto h_mem = run_counting(mem, cc, HistogramTag::memory, n);
  const auto est = estimate_efficiency(h_ref, h_mem, cc, {t0 - w / 2.0, t0 + w / 2.0},
                                       {t0 + tau - w / 2.0, t0 + tau + w / 2.0});

  Json doc;
  doc["eta"] = est.eta;
  doc["sigma"] = est.sigma;
  doc["n_trials"] = est.n_trials;
  doc["seed"] = est.seed;
  doc["source"] = to_string(cfg.montecarlo.source);
  doc["eta_true"] = run.result.efficiency;

  const Paths paths{out / "montecarlo_reference.csv", out / "montecarlo_memory.csv",
                    out / "montecarlo_estimate.json"};
  write_csv(paths[0], histogram_table(h_ref));
  write_csv(paths[1], histogram_table(h_mem));
  write_json(paths[2], doc);
  return paths;
}

Paths cmd_montecarlo(const RunConfig& cfg, const fs::path& out) {
  switch (cfg.montecarlo.source) {
    case McSource::storage: return cmd_montecarlo_storage(cfg, out);
    case McSource::scan_storage_time: return cmd_scan_storage_time(cfg, out, true);
    case McSource::scan_bandwidth: return cmd_scan_bandwidth(cfg, out, true);
    case McSource::qubit_fringe: return cmd_qubit_fringe(cfg, out, true);
  }
  return {};
}

using Command = std::function<Paths(const RunConfig&, const fs::path&)>;

const std::map<std::string, Command, std::less<>>& commands() {
  static const std::map<std::string, Command, std::less<>> table{
      {"storage", cmd_storage},
      {"scan-storage-time",
       [](const RunConfig& c, const fs::path& o) { return cmd_scan_storage_time(c, o, false); }},
      {"scan-bandwidth",
       [](const RunConfig& c, const fs::path& o) { return cmd_scan_bandwidth(c, o, false); }},
      {"optimize-comb", cmd_optimize_comb},
      {"qubit-fringe",
       [](const RunConfig& c, const fs::path& o) { return cmd_qubit_fringe(c, o, false); }},
      {"linewidth", cmd_linewidth},
      {"montecarlo", cmd_montecarlo},
  };
  return table;
}

}  // namespace

FrequencyGrid make_grid(const RunConfig& cfg) {
  FrequencyGrid g{0.0, cfg.grid.span, static_cast<std::size_t>(cfg.grid.points)};
  g.validate();
  return g;
}

CombSpec make_comb(const RunConfig& cfg) {
  const auto& c = cfg.comb;
  CombSpec spec;
  spec.tooth_spacing = c.tooth_spacing;
  spec.finesse = c.finesse;
  spec.shape = c.shape;
  spec.peak_od = c.effective_depth > 0.0
                     ? peak_od_for_effective_depth(c.shape, c.finesse, c.effective_depth,
                                                   c.background_od)
                     : c.peak_od;
  spec.background_od = c.background_od;
  spec.bandwidth = c.bandwidth;
  spec.center_offset = c.center_offset;
  spec.validate();
  return spec;
}

SpectralPit make_pit(const RunConfig& cfg) { return {cfg.comb.pit_width, cfg.comb.line_od}; }

CavitySpec make_cavity(const RunConfig& cfg) {
  const auto& c = cfg.cavity;
  CavitySpec spec{c.r_in, c.r_out, c.loss, c.round_trip_time, c.resonance_offset};
  spec.validate();
  return spec;
}

StorageSetup make_storage_setup(const RunConfig& cfg) {
  StorageSetup s;
  s.comb = make_comb(cfg);
  s.pit = make_pit(cfg);
  s.cavity = make_cavity(cfg);
  s.grid = make_grid(cfg);
  s.pulse_fwhm = cfg.pulse.fwhm;
  s.pulse_center = cfg.pulse.center;
  s.mu_in = cfg.pulse.mu_in;
  s.window = cfg.pulse.window;
  s.use_cavity = cfg.cavity.enabled;
  return s;
}

TimeBinQubit make_qubit(const RunConfig& cfg, double phase_rad) {
  auto q = TimeBinQubit::equator(phase_rad);
  q.bin_separation = cfg.qubit.bin_separation;
  q.pulse_fwhm = cfg.qubit.pulse_fwhm;
  q.mu_in = cfg.qubit.mu_in;
  q.validate();
  return q;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, cmd] : commands()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<std::filesystem::path> run_command(std::string_view name, const RunConfig& cfg) {
  const auto it = commands().find(name);
  if (it == commands().end()) throw std::invalid_argument("unknown command " + std::string(name));
  return it->second(cfg, fs::path(cfg.output.directory));
}

}  // namespace afcsim::cli
