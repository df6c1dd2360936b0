#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "semflow/uev.hpp"

namespace semflow {

// Run parameters shared by the CLI commands. Defaults are the stock operating
// point: 30 steps, decayed gains, guidance 2.0 / 5.5, sigma 9, patience 8,
// at most 3 rounds, amplitude 4.0, target stddev 0.25.
struct RunConfig {
    std::uint64_t seed = 0;
    int steps = 30;
    AlphaSchedule::Kind schedule = AlphaSchedule::Kind::decayed;
    double scale_src = 2.0;
    double scale_tar = 5.5;
    double sigma = 9.0;
    int patience_window = 8;
    double min_improvement = 1e-3;
    int max_rounds = 3;
    double amplitude = 4.0;
    double stddev = 0.25;
    std::string best_pick = "first";  // or "last"

    UevConfig to_uev_config() const;
    void validate() const;
};

// Key-value text format: one "key = value" per line, '#' comments, keys as in
// RunConfig (seed, steps, schedule, scale_src, scale_tar, sigma,
// patience_window, min_improvement, max_rounds, amplitude, stddev, best_pick).
// Unknown keys raise ConfigError.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Environment overrides: SEMFLOW_<KEY> (uppercased key) replaces the file
// value, e.g. SEMFLOW_SEED=7, SEMFLOW_SCHEDULE=uniform. Applied on top of
// base; malformed values raise ConfigError.
RunConfig apply_env_overrides(RunConfig base);

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace semflow
