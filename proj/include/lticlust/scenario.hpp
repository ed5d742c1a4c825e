#pragma once

#include <cstdint>
#include <vector>

#include "lticlust/config.hpp"
#include "lticlust/lti.hpp"

namespace lticlust {

struct ClusterScenario {
    std::vector<StateSpaceModel> centers;
    std::vector<StateSpaceModel> system_models;  ///< cluster-major: system k*N + j
    std::vector<int> truth;                      ///< 0-based cluster of each system
    double separation = 0.0;  ///< min pairwise center distance at L1; +inf when K = 1
    double width = 0.0;       ///< target max distance of a system from its center
    Index horizon = 0;        ///< L1, the horizon of both distances
};

/// Draws K centers with random_stable_model, rejecting any candidate closer
/// than min_separation (horizon L1) to an accepted center, then perturbs B
/// and C of each member along a random direction with its scale bisected
/// until the distance to the center lies in [0.8 width, width].
/// Throws InfeasibleSeparationError after 1000 consecutive rejections.
ClusterScenario generate_scenario(const ExperimentConfig& config, double width, int per_cluster,
                                  std::uint64_t seed);

}  // namespace lticlust
