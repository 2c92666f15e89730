#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "afcsim/cavity.hpp"
#include "afcsim/propagation.hpp"
#include "afcsim/timebin.hpp"
#include "config.hpp"

namespace afcsim::cli {

FrequencyGrid make_grid(const RunConfig& cfg);
/// Memory comb; a positive comb.effective_depth overrides peak_od.
CombSpec make_comb(const RunConfig& cfg);
SpectralPit make_pit(const RunConfig& cfg);
CavitySpec make_cavity(const RunConfig& cfg);
StorageSetup make_storage_setup(const RunConfig& cfg);
TimeBinQubit make_qubit(const RunConfig& cfg, double phase_rad);

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its files under cfg.output.directory.
/// Returns the written paths in order.
std::vector<std::filesystem::path> run_command(std::string_view name, const RunConfig& cfg);

}  // namespace afcsim::cli
