#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "afcsim/analytics.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace afcsim;
using namespace afcsim::cli;

namespace {

// Message of the ConfigError thrown by parse_config, or "" if none.
std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto cfg = parse_config("[comb]\ntooth_spacing = 0.5\n");
  CHECK(cfg.comb.tooth_spacing == 0.5);
  RunConfig expected;
  expected.comb.tooth_spacing = 0.5;
  CHECK(cfg == expected);
}

TEST_CASE("empty text gives the defaults") {
  CHECK(parse_config("") == RunConfig{});
  CHECK(parse_config("# only a comment\n\n   \n") == RunConfig{});
}

TEST_CASE("out-of-range r_in names the field and line") {
  const auto msg = parse_error("[cavity]\nR_in = 1.5\n");
  CHECK(contains(msg, "r_in"));
  CHECK(contains(msg, "range violation"));
  CHECK(error_line("[cavity]\nR_in = 1.5\n") == 2);
}

TEST_CASE("keys and sections are case insensitive") {
  const auto cfg = parse_config("[Cavity]\nR_OUT = 0.9\n");
  CHECK(cfg.cavity.r_out == 0.9);
}

TEST_CASE("strict schema rejects unknown keys and sections") {
  CHECK(contains(parse_error("[comb]\ntooth_spacin = 0.5\n"), "unknown key"));
  CHECK(error_line("[comb]\n\ntooth_spacin = 0.5\n") == 3);
  CHECK(contains(parse_error("[combs]\n"), "unknown section"));
  CHECK(contains(parse_error("[comb]\nfinesse = 5\nfinesse = 6\n"), "duplicate"));
  CHECK(error_line("[comb]\nfinesse = 5\nfinesse = 6\n") == 3);
}

TEST_CASE("malformed lines are parse errors with line numbers") {
  CHECK(contains(parse_error("[comb\n"), "parse error"));
  CHECK(contains(parse_error("[comb]\nfinesse 5\n"), "parse error"));
  CHECK(contains(parse_error("finesse = 5\n"), "parse error"));
  CHECK(error_line("[comb]\nfinesse =\n") == 2);
  CHECK(contains(parse_error("[comb]\nfinesse = 5x\n"), "comb.finesse"));
  CHECK(contains(parse_error("[comb]\nfinesse = nan\n"), "comb.finesse"));
  CHECK(contains(parse_error("[cavity]\nenabled = yes\n"), "cavity.enabled"));
  CHECK(contains(parse_error("[comb]\nshape = lorentzian\n"), "comb.shape"));
}

TEST_CASE("values of every kind parse") {
  const auto cfg = parse_config(
      "[comb]\nshape = square   # trailing comment\n"
      "[cavity]\nenabled = false\n"
      "[qubit]\nphases_deg = 10, 20,30\nshifts_per_period = 12\n"
      "[montecarlo]\nsource = qubit-fringe\nseed = 18446744073709551615\n"
      "[output]\ndirectory = some dir\n");
  CHECK(cfg.comb.shape == ToothShape::square);
  CHECK_FALSE(cfg.cavity.enabled);
  CHECK(cfg.qubit.phases_deg == std::vector<double>{10.0, 20.0, 30.0});
  CHECK(cfg.qubit.shifts_per_period == 12);
  CHECK(cfg.montecarlo.source == McSource::qubit_fringe);
  CHECK(cfg.montecarlo.seed == 18446744073709551615ULL);
  CHECK(cfg.output.directory == "some dir");
}

TEST_CASE("cross-field validation") {
  CHECK(contains(parse_error("[grid]\npoints = 1000\n"), "grid.points"));
  CHECK(contains(parse_error("[cavity]\nloss = 0.98\n"), "cavity.loss"));
  CHECK(contains(parse_error("[qubit]\npulse_fwhm = 1.5\n"), "qubit.bin_separation"));
  CHECK(contains(parse_error("[comb]\nfinesse = 0.5\n"), "comb.finesse"));
  CHECK(contains(parse_error("[scan]\nstorage_times = 1, -2\n"), "scan.storage_times"));
}

TEST_CASE("defaults round-trip through the printed form") {
  const RunConfig defaults;
  const auto text = format_config(defaults);
  CHECK(parse_config(text) == defaults);
  CHECK(contains(text, "[montecarlo]"));
  CHECK(contains(text, "# "));
}

TEST_CASE("non-default values round-trip exactly") {
  RunConfig cfg;
  cfg.comb.finesse = 10.0 / 3.0;
  cfg.comb.shape = ToothShape::square;
  cfg.cavity.enabled = false;
  cfg.scan.storage_times = {0.1, 1e-7, 123456.789};
  cfg.montecarlo.source = McSource::scan_bandwidth;
  cfg.montecarlo.seed = 42;
  cfg.output.directory = "x/y";
  CHECK(parse_config(format_config(cfg)) == cfg);
}

TEST_CASE("shipped configs parse and round-trip") {
  for (const auto& entry : std::filesystem::directory_iterator(AFCSIM_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path().string());
    CHECK(parse_config(format_config(cfg)) == cfg);
  }
}

TEST_CASE("missing config file is a config error") {
  CHECK_THROWS_AS(load_config("/nonexistent/afcsim.cfg"), ConfigError);
}

TEST_CASE("csv numbers carry 9 significant digits") {
  CHECK(format_number(0.123456789123) == "0.123456789");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-1.5e-12) == "-1.5e-12");
  CHECK(format_number(123456789012.0) == "1.23456789e+11");
  CHECK(format_number(std::nan("")) == "nan");

  CsvTable t({"a", "b"});
  t.add_row({1.0, 0.5});
  CHECK(t.str() == "a,b\n1,0.5\n");
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("effective depth overrides peak od") {
  RunConfig cfg;
  cfg.comb.effective_depth = 0.4;
  const auto comb = make_comb(cfg);
  CHECK(comb.peak_od == doctest::Approx(peak_od_for_effective_depth(comb.shape, comb.finesse, 0.4)));
  cfg.comb.effective_depth = 0.0;
  CHECK(make_comb(cfg).peak_od == cfg.comb.peak_od);
}

TEST_CASE("optimize-comb at the projection point") {
  RunConfig cfg;
  cfg.cavity.r_out = 1.0;
  cfg.cavity.loss = 0.01;
  cfg.comb.finesse = 10.0;
  cfg.comb.shape = ToothShape::square;
  cfg.output.directory = (std::filesystem::temp_directory_path() / "afcsim_optimize_test").string();
  const auto paths = run_command("optimize-comb", cfg);
  REQUIRE(paths.size() == 1);
  std::ifstream in(paths[0]);
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["eta_star"].get<double>() == doctest::Approx(0.91).epsilon(0.02 / 0.91));
  CHECK(doc["matched_residual"].is_number());
  std::filesystem::remove_all(cfg.output.directory);
}

TEST_CASE("every subcommand is registered") {
  const std::vector<std::string> expected{"linewidth",     "montecarlo",        "optimize-comb",
                                          "qubit-fringe",  "scan-bandwidth",    "scan-storage-time",
                                          "storage"};
  CHECK(command_names() == expected);
  CHECK_THROWS(run_command("nope", RunConfig{}));
}
