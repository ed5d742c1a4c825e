#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lticlust/clustering.hpp"
#include "lticlust/estimation.hpp"
#include "lticlust/realization.hpp"

namespace lticlust {

struct PipelineOptions {
    Index n = 1;               ///< realization order
    int K = 1;                 ///< number of clusters
    std::optional<Index> L1;   ///< clustering horizon; default_l1() when unset
    Index L2 = 3;              ///< refinement horizon, >= 2n+1
    int restarts = 20;
    int max_iter = 300;
    int threads = 1;
    std::uint64_t seed = 0;
    /// Test hook: skip k-means and use these 0-based labels instead.
    std::optional<std::vector<int>> label_override;
};

struct PipelineDiagnostics {
    Index L1 = 0;
    std::vector<double> system_condition;   ///< cond(U_i) at L1, per system
    std::vector<double> cluster_condition;  ///< cond of pooled U at L2, per cluster
    std::vector<double> cluster_sigma_min;  ///< sigma_min of pooled U, per cluster
    std::vector<int> cluster_size;          ///< systems assigned to each cluster
    std::vector<int> cluster_pooled;        ///< of those, trajectories used at L2
    double kmeans_sse = 0.0;
    int restarts_used = 0;
};

struct PipelineOutput {
    std::vector<int> assignments;
    std::vector<MarkovBlock> cluster_markov;       ///< horizon L2
    std::vector<RealizationReport> cluster_models;
    std::vector<MarkovBlock> per_system_markov;    ///< horizon L1
    PipelineDiagnostics diagnostics;

    /// Every system is identified with its cluster's realization.
    const StateSpaceModel& system_model(std::size_t i) const
    {
        return cluster_models[static_cast<std::size_t>(assignments[i])].model;
    }
};

/// Clustering horizon used when none is configured: min_i floor(T_i / m),
/// additionally limited so each single trajectory still has T_f >= m(L+1),
/// capped at 8 and at least 1.
Index default_l1(const std::vector<TrajectoryData>& trajs);

/// A trajectory takes part in the pooled step-3 fit when T >= L2 + m(L2+1).
bool eligible_for_refinement(const TrajectoryData& traj, Index L2);

/// 1. per-system least squares at L1
/// 2. k-means on the flattened estimates
/// 3. pooled least squares at L2 per cluster, over eligible members only
/// 4. Ho-Kalman per cluster
PipelineOutput run_algorithm1(const std::vector<TrajectoryData>& trajs, const PipelineOptions& opts);

}  // namespace lticlust
