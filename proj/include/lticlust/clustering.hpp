#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace lticlust {

struct KMeansOptions {
    int K = 1;
    int restarts = 20;
    int max_iter = 300;
    int threads = 1;
};

/// Labels are 0-based: every entry of `assignments` lies in [0, K).
struct ClusteringResult {
    std::vector<int> assignments;
    std::vector<Eigen::VectorXd> centroids;
    double sse = 0.0;
    int restarts_used = 0;
    int best_restart = 0;
    std::vector<double> restart_sse;   ///< final SSE of each restart
    std::vector<double> sse_history;   ///< per-iteration SSE of the kept restart
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts`.
///
/// Assignment ties go to the lowest centroid index. A cluster left empty is
/// refilled with the point farthest from its centroid (taken from a cluster
/// with more than one member). Each restart runs on its own seed derived
/// from (seed, restart index), so the result does not depend on `threads`.
ClusteringResult kmeans(const std::vector<Eigen::VectorXd>& points, const KMeansOptions& opts,
                        std::uint64_t seed);

/// Sum of squared distances to the per-cluster means for a fixed labeling.
double assignment_sse(const std::vector<Eigen::VectorXd>& points, const std::vector<int>& labels,
                      int K);

struct ClusterMatch {
    std::vector<int> permutation;  ///< estimated label -> truth label
    double accuracy = 0.0;
};

/// Best label permutation between two 0-based labelings: exhaustive over
/// K! for K <= 8, greedy on the confusion matrix beyond that.
ClusterMatch match_clusters(const std::vector<int>& estimated, const std::vector<int>& truth, int K);

}  // namespace lticlust
