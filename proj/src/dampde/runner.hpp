#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dampde {

struct JobOptions {
    int threads = 0;  // 0 means one worker per hardware thread
    bool svg = false;
    bool dump_fields = false;          // simulate only
    std::optional<int> n;              // overrides the config resolution
    std::optional<std::size_t> m;      // overrides the config step count
    std::vector<std::size_t> m_list;   // sweep for the time-refinement studies
    std::vector<int> n_list;           // sweep for the space-refinement studies
};

struct JobOutput {
    std::string name;  // file name relative to the output directory
    std::string text;
};

struct JobResult {
    std::vector<JobOutput> outputs;
    std::string summary;
    bool numeric_failure = false;  // a run failed numerically; outputs still valid
};

// Runs one subcommand: simulate, convergence-time, convergence-space,
// optimize, optimize-convergence, or verify. An empty config string means the
// default configuration; verify ignores the config. Throws ConfigError on bad
// input. Numerical failures are captured in the result instead of thrown so
// partial study output survives.
JobResult run_job(const std::string& mode, const std::string& config_json,
                  const JobOptions& opt = {});

} // namespace dampde
