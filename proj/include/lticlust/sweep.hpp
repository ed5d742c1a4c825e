#pragma once

#include <cstdint>
#include <vector>

#include "lticlust/config.hpp"
#include "lticlust/pipeline.hpp"
#include "lticlust/scenario.hpp"

namespace lticlust {

/// One trial of one grid cell. Metric fields are NaN when error_flag is set.
struct ResultRow {
    int trial = 0;
    int K = 0;
    int N = 0;
    Index T = 0;
    Index L1 = 0;
    Index L2 = 0;
    double width = 0.0;
    double clustering_accuracy = 0.0;
    double avg_markov_error = 0.0;       ///< mean_k ||G_pi(k) - G_k||_F over blocks 0..metric_L
    double avg_realization_error = 0.0;  ///< mean_k impulse-response distance over 0..L2
    double kmeans_sse = 0.0;
    double min_sv_U = 0.0;               ///< smallest sigma_min of the pooled input matrices
    double runtime_ms = 0.0;
    int error_flag = 0;
};

struct TrialMetrics {
    double accuracy = 0.0;
    double avg_markov_error = 0.0;
    double avg_realization_error = 0.0;
    std::vector<int> permutation;  ///< truth cluster k -> estimated cluster
};

/// Scores a pipeline run against the scenario's centers. Cluster estimates
/// are matched to centers by the permutation minimizing the average Markov
/// error (exhaustive for K <= 8).
TrialMetrics score_trial(const ClusterScenario& scenario, const PipelineOutput& output,
                         Index metric_L, Index realization_L);

/// Simulates `T` steps for every system of the scenario.
std::vector<TrajectoryData> simulate_scenario(const ClusterScenario& scenario, Index T,
                                              const NoiseSpec& noise, std::uint64_t seed);

/// Runs a single (width, N, T, trial) job. Errors are captured in the row.
ResultRow run_trial(const ExperimentConfig& config, std::size_t width_index, int N, Index T,
                    int trial);

/// Every (width, N, T) cell times `trials`, in that nesting order. Rows come
/// back in grid order whatever `threads` is.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config);

}  // namespace lticlust
