#include "lticlust/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "lticlust/errors.hpp"
#include "lticlust/parallel.hpp"
#include "lticlust/rng.hpp"

namespace lticlust {

Index default_l1(const std::vector<TrajectoryData>& trajs)
{
    if (trajs.empty())
        throw HorizonError("no trajectories");
    const Index m = trajs.front().m();
    Index L = 8;
    for (const auto& tr : trajs) {
        const Index T = tr.length();
        L = std::min(L, T / m);
        L = std::min(L, (T + 1 - m) / (m + 1));
    }
    return std::max<Index>(L, 1);
}

bool eligible_for_refinement(const TrajectoryData& traj, Index L2)
{
    return traj.length() >= L2 + traj.m() * (L2 + 1);
}

namespace {

[[noreturn]] void rethrow_with_stage(const IllConditionedError& e, const std::string& stage)
{
    throw IllConditionedError(stage + ": " + e.what(), e.condition());
}

}  // namespace

PipelineOutput run_algorithm1(const std::vector<TrajectoryData>& trajs, const PipelineOptions& opts)
{
    if (trajs.empty())
        throw HorizonError("run_algorithm1: no trajectories");
    if (opts.K < 1)
        throw DegenerateInputError("run_algorithm1: K must be positive");
    if (opts.L2 < 2 * opts.n + 1)
        throw HorizonError("run_algorithm1: L2 = " + std::to_string(opts.L2) +
                           " < 2n+1 = " + std::to_string(2 * opts.n + 1));

    const Index L1 = opts.L1 ? *opts.L1 : default_l1(trajs);
    Index min_T = trajs.front().length();
    for (const auto& tr : trajs)
        min_T = std::min(min_T, tr.length());
    if (L1 < 1 || L1 > min_T - 1)
        throw HorizonError("run_algorithm1: L1 = " + std::to_string(L1) + " outside [1, " +
                           std::to_string(min_T - 1) + "]");

    PipelineOutput out;
    out.diagnostics.L1 = L1;
    const std::size_t total = trajs.size();

    // Step 1: individual estimates.
    std::vector<std::optional<LeastSquaresFit>> fits(total);
    parallel_for(total, opts.threads, [&](std::size_t i) {
        try {
            fits[i] = ls_markov_fit(std::span(&trajs[i], 1), L1);
        } catch (const IllConditionedError& e) {
            rethrow_with_stage(e, "step 1 (system " + std::to_string(i) + ")");
        }
    });
    std::vector<VectorXd> points;
    points.reserve(total);
    for (auto& fit : fits) {
        out.diagnostics.system_condition.push_back(fit->condition());
        points.push_back(fit->estimate.flatten());
        out.per_system_markov.push_back(std::move(fit->estimate));
    }

    // Step 2: cluster assignments.
    if (opts.label_override) {
        if (opts.label_override->size() != total)
            throw DegenerateInputError("label override has wrong length");
        out.assignments = *opts.label_override;
        for (int label : out.assignments)
            if (label < 0 || label >= opts.K)
                throw DegenerateInputError("label override outside [0, K)");
        out.diagnostics.kmeans_sse = assignment_sse(points, out.assignments, opts.K);
    } else {
        KMeansOptions km{opts.K, opts.restarts, opts.max_iter, 1};
        ClusteringResult clusters = kmeans(points, km, derive_seed(opts.seed, "kmeans"));
        out.assignments = std::move(clusters.assignments);
        out.diagnostics.kmeans_sse = clusters.sse;
        out.diagnostics.restarts_used = clusters.restarts_used;
    }

    // Steps 3 and 4: pooled refinement and realization per cluster.
    const auto K = static_cast<std::size_t>(opts.K);
    std::vector<std::vector<TrajectoryData>> pooled(K);
    out.diagnostics.cluster_size.assign(K, 0);
    for (std::size_t i = 0; i < total; ++i) {
        const auto k = static_cast<std::size_t>(out.assignments[i]);
        ++out.diagnostics.cluster_size[k];
        if (eligible_for_refinement(trajs[i], opts.L2))
            pooled[k].push_back(trajs[i]);
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (pooled[k].empty()) {
            std::ostringstream os;
            os << "cluster " << k << " has no trajectory of length >= "
               << opts.L2 + trajs.front().m() * (opts.L2 + 1) << " for refinement at L2 = "
               << opts.L2;
            throw InsufficientLengthError(os.str(), static_cast<int>(k));
        }
    }

    std::vector<std::optional<LeastSquaresFit>> refined(K);
    std::vector<std::optional<RealizationReport>> realized(K);
    parallel_for(K, opts.threads, [&](std::size_t k) {
        try {
            refined[k] = ls_markov_fit(std::span<const TrajectoryData>(pooled[k]), opts.L2);
        } catch (const IllConditionedError& e) {
            rethrow_with_stage(e, "step 3 (cluster " + std::to_string(k) + ")");
        }
        realized[k] = ho_kalman(refined[k]->estimate, opts.n);
    });
    for (std::size_t k = 0; k < K; ++k) {
        out.diagnostics.cluster_pooled.push_back(static_cast<int>(pooled[k].size()));
        out.diagnostics.cluster_condition.push_back(refined[k]->condition());
        out.diagnostics.cluster_sigma_min.push_back(refined[k]->sigma_min_U);
        out.cluster_markov.push_back(std::move(refined[k]->estimate));
        out.cluster_models.push_back(std::move(*realized[k]));
    }
    return out;
}

}  // namespace lticlust
