// Config-driven scenario runner behind the CLI subcommands.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace circlelab::cli {

struct RunOptions {
    std::string scenario;      // cascade | distortion | expansion | flow | walk | spikes | all
    std::string config_path;   // optional JSON config
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool seed_overridden = false;
    int threads = 0;
    int grid = 0;              // 0 = scenario default
    bool json_mirror = false;
};

// Returns the process exit code: 0 ok, 1 FAILED rows, 2 config error.
int run_scenarios(const RunOptions& opts);

} // namespace circlelab::cli
