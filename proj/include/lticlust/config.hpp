#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lticlust/lti.hpp"

namespace lticlust {

/// Declarative sweep specification, read from a flat JSON object.
/// Every key is required except the ones documented with a default below.
struct ExperimentConfig {
    int K = 3;
    int N = 8;  ///< trajectories per cluster for `generate`
    Index n = 3, m = 1, p = 1;
    std::vector<Index> T_grid;
    std::vector<int> N_grid;
    Index L1 = 4;
    Index L2 = 7;
    Index metric_L = 4;  ///< default 4
    std::pair<double, double> rho_range{0.6, 0.9};
    NoiseSpec noise{1.0, 0.15, 0.2};
    std::vector<double> width_grid{0.0};
    double min_separation = 0.5;
    int trials = 20;
    std::uint64_t seed = 0;
    int restarts = 20;   ///< default 20
    int max_iter = 300;  ///< default 300
    bool zero_d = false;             ///< default false
    bool include_feedthrough = true; ///< default true; D enters the model distance
    bool record_runtime = false;     ///< default false; runtime_ms is 0 when off
    int threads = 1;                 ///< default 1
    std::filesystem::path out_dir = "out";  ///< default "out"

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Throws ConfigError for unknown keys, missing required keys and bad types.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

}  // namespace lticlust
