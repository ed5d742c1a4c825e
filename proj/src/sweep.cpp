#include "lticlust/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "lticlust/clustering.hpp"
#include "lticlust/errors.hpp"
#include "lticlust/parallel.hpp"
#include "lticlust/rng.hpp"

namespace lticlust {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> best_center_permutation(const std::vector<MarkovBlock>& truth,
                                         const std::vector<MarkovBlock>& estimate,
                                         const ClusterMatch& label_match)
{
    const std::size_t K = truth.size();
    auto total = [&](const std::vector<int>& perm) {
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            sum += (estimate[static_cast<std::size_t>(perm[k])].matrix() - truth[k].matrix()).norm();
        return sum;
    };

    if (K > 8) {
        // Invert the label matching: truth k -> estimated e.
        std::vector<int> perm(K, 0);
        for (std::size_t e = 0; e < K; ++e)
            perm[static_cast<std::size_t>(label_match.permutation[e])] = static_cast<int>(e);
        return perm;
    }
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_err = std::numeric_limits<double>::infinity();
    do {
        const double err = total(perm);
        if (err < best_err) {
            best_err = err;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TrialMetrics score_trial(const ClusterScenario& scenario, const PipelineOutput& output,
                         Index metric_L, Index realization_L)
{
    const int K = static_cast<int>(scenario.centers.size());
    TrialMetrics m;
    const ClusterMatch match = match_clusters(output.assignments, scenario.truth, K);
    m.accuracy = match.accuracy;

    std::vector<MarkovBlock> truth, estimate;
    for (const auto& center : scenario.centers)
        truth.push_back(markov_parameters(center, metric_L));
    for (const auto& g : output.cluster_markov)
        estimate.push_back(g.truncated(metric_L));
    m.permutation = best_center_permutation(truth, estimate, match);

    double markov = 0.0, realization = 0.0;
    for (int k = 0; k < K; ++k) {
        const auto e = static_cast<std::size_t>(m.permutation[static_cast<std::size_t>(k)]);
        markov += (estimate[e].matrix() - truth[static_cast<std::size_t>(k)].matrix()).norm();
        realization += realization_error(scenario.centers[static_cast<std::size_t>(k)],
                                         output.cluster_models[e].model, realization_L);
    }
    m.avg_markov_error = markov / K;
    m.avg_realization_error = realization / K;
    return m;
}

std::vector<TrajectoryData> simulate_scenario(const ClusterScenario& scenario, Index T,
                                              const NoiseSpec& noise, std::uint64_t seed)
{
    const std::size_t K = scenario.centers.size();
    const std::size_t per_cluster = scenario.system_models.size() / K;
    std::vector<TrajectoryData> out;
    out.reserve(scenario.system_models.size());
    for (std::size_t i = 0; i < scenario.system_models.size(); ++i) {
        // Seed by (cluster, member) so a larger N extends a smaller one.
        const std::uint64_t k = i / per_cluster, j = i % per_cluster;
        out.push_back(simulate(scenario.system_models[i], T, noise, derive_seed(seed, "system", k, j)));
    }
    return out;
}

ResultRow run_trial(const ExperimentConfig& config, std::size_t width_index, int N, Index T,
                    int trial)
{
    ResultRow row;
    row.trial = trial;
    row.K = config.K;
    row.N = N;
    row.T = T;
    row.L1 = config.L1;
    row.L2 = config.L2;
    row.width = config.width_grid.at(width_index);

    const auto start = std::chrono::steady_clock::now();
    const auto t = static_cast<std::uint64_t>(trial);
    try {
        const ClusterScenario scenario = generate_scenario(
            config, row.width, N, derive_seed(config.seed, "scenario", width_index, t));
        const auto trajs = simulate_scenario(scenario, T, config.noise,
                                             derive_seed(config.seed, "simulate", width_index, t));

        PipelineOptions opts;
        opts.n = config.n;
        opts.K = config.K;
        opts.L1 = config.L1;
        opts.L2 = config.L2;
        opts.restarts = config.restarts;
        opts.max_iter = config.max_iter;
        opts.seed = derive_seed(config.seed, "pipeline", width_index, t);
        const PipelineOutput out = run_algorithm1(trajs, opts);

        const TrialMetrics metrics = score_trial(scenario, out, config.metric_L, config.L2);
        row.clustering_accuracy = metrics.accuracy;
        row.avg_markov_error = metrics.avg_markov_error;
        row.avg_realization_error = metrics.avg_realization_error;
        row.kmeans_sse = out.diagnostics.kmeans_sse;
        row.min_sv_U = *std::min_element(out.diagnostics.cluster_sigma_min.begin(),
                                         out.diagnostics.cluster_sigma_min.end());
    } catch (const Error&) {
        row.error_flag = 1;
        row.clustering_accuracy = row.avg_markov_error = row.avg_realization_error = kNaN;
        row.kmeans_sse = row.min_sv_U = kNaN;
    }
    if (config.record_runtime)
        row.runtime_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config)
{
    config.validate();
    struct Job {
        std::size_t width_index;
        int N;
        Index T;
        int trial;
    };
    std::vector<Job> jobs;
    for (std::size_t w = 0; w < config.width_grid.size(); ++w)
        for (int N : config.N_grid)
            for (Index T : config.T_grid)
                for (int trial = 0; trial < config.trials; ++trial)
                    jobs.push_back({w, N, T, trial});

    std::vector<ResultRow> rows(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        const Job& job = jobs[i];
        rows[i] = run_trial(config, job.width_index, job.N, job.T, job.trial);
    });
    return rows;
}

}  // namespace lticlust
