#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lticlust/errors.hpp"
#include "lticlust/pipeline.hpp"
#include "oracles.hpp"

using namespace lticlust;

namespace {

const NoiseSpec kNoise{1.0, 0.15, 0.2};

StateSpaceModel nilpotent(std::mt19937_64& eng)
{
    std::normal_distribution<double> g;
    MatrixXd A = MatrixXd::Zero(2, 2);
    A(0, 1) = 1.0 + std::abs(g(eng));
    MatrixXd B(2, 1), C(1, 2), D(1, 1);
    B << g(eng), 1.0 + std::abs(g(eng));
    C << 1.0 + std::abs(g(eng)), g(eng);
    D << g(eng);
    return StateSpaceModel(A, B, C, D);
}

struct Batch {
    std::vector<StateSpaceModel> centers;
    std::vector<TrajectoryData> trajs;
    std::vector<int> truth;
};

Batch identical_clusters(const std::vector<StateSpaceModel>& centers, int per_cluster, Index T,
                         const NoiseSpec& noise, std::uint64_t seed)
{
    Batch b;
    b.centers = centers;
    for (std::size_t k = 0; k < centers.size(); ++k)
        for (int j = 0; j < per_cluster; ++j) {
            b.trajs.push_back(simulate(centers[k], T, noise, seed + 1000 * k + static_cast<std::uint64_t>(j)));
            b.truth.push_back(static_cast<int>(k));
        }
    return b;
}

// Average Markov error of cluster estimates against their matched centers.
double matched_markov_error(const Batch& b, const PipelineOutput& out, Index L)
{
    const auto K = static_cast<int>(b.centers.size());
    const auto match = match_clusters(out.assignments, b.truth, K);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        const auto& center = b.centers[static_cast<std::size_t>(match.permutation[static_cast<std::size_t>(k)])];
        total += (out.cluster_markov[static_cast<std::size_t>(k)].matrix() -
                  markov_parameters(center, L).matrix())
                     .norm();
    }
    return total / K;
}

}  // namespace

TEST_CASE("single cluster reduces to pooled least squares")
{
    const auto model = random_stable_model(2, 1, 1, {0.6, 0.9}, 3);
    std::vector<TrajectoryData> trajs;
    for (int i = 0; i < 6; ++i)
        trajs.push_back(simulate(model, 120, kNoise, 50 + i));
    PipelineOptions opts;
    opts.n = 2;
    opts.K = 1;
    opts.L2 = 6;
    const auto out = run_algorithm1(trajs, opts);
    const MarkovBlock direct = ls_markov(trajs, 6);
    CHECK(out.cluster_markov[0].matrix() == direct.matrix());
    CHECK(out.diagnostics.cluster_pooled[0] == 6);
    CHECK(std::all_of(out.assignments.begin(), out.assignments.end(), [](int a) { return a == 0; }));
}

TEST_CASE("exact recovery on noiseless nilpotent clusters")
{
    std::mt19937_64 eng(12);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<StateSpaceModel> centers;
        for (int k = 0; k < 3; ++k)
            centers.push_back(nilpotent(eng));
        const auto b = identical_clusters(centers, 4, 100, NoiseSpec{1.0, 0, 0}, 10 * trial);
        PipelineOptions opts;
        opts.n = 2;
        opts.K = 3;
        opts.L2 = 5;
        opts.seed = static_cast<std::uint64_t>(trial);
        const auto out = run_algorithm1(b.trajs, opts);
        const auto match = match_clusters(out.assignments, b.truth, 3);
        CHECK(match.accuracy == 1.0);
        CHECK(matched_markov_error(b, out, 5) <= 1e-8);
        for (std::size_t i = 0; i < b.trajs.size(); ++i) {
            const auto& truth = centers[static_cast<std::size_t>(b.truth[i])];
            CHECK(realization_error(truth, out.system_model(i), 20) <= 1e-8);
        }
    }
}

TEST_CASE("pooling within a cluster reduces the error")
{
    double err1 = 0.0, err16 = 0.0;
    const int trials = 8;
    for (int trial = 0; trial < trials; ++trial) {
        const std::vector<StateSpaceModel> centers{
            random_stable_model(2, 1, 1, {0.6, 0.9}, 200 + 2 * trial),
            random_stable_model(2, 1, 1, {0.6, 0.9}, 201 + 2 * trial)};
        PipelineOptions opts;
        opts.n = 2;
        opts.K = 2;
        opts.L2 = 6;
        opts.label_override.reset();
        for (int N : {1, 16}) {
            const auto b = identical_clusters(centers, N, 150, kNoise, 7000 + 100 * trial);
            opts.label_override = b.truth;
            const double e = matched_markov_error(b, run_algorithm1(b.trajs, opts), 6);
            (N == 1 ? err1 : err16) += e / trials;
        }
    }
    CHECK(err16 < 0.5 * err1);
}

TEST_CASE("ground-truth labels never hurt on average")
{
    double with_kmeans = 0.0, with_truth = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<StateSpaceModel> centers{
            random_stable_model(2, 1, 1, {0.6, 0.9}, 900 + 3 * trial),
            random_stable_model(2, 1, 1, {0.6, 0.9}, 901 + 3 * trial),
            random_stable_model(2, 1, 1, {0.6, 0.9}, 902 + 3 * trial)};
        const auto b = identical_clusters(centers, 4, 40, kNoise, 50 * trial);
        PipelineOptions opts;
        opts.n = 2;
        opts.K = 3;
        opts.L2 = 5;
        opts.seed = 11;
        with_kmeans += matched_markov_error(b, run_algorithm1(b.trajs, opts), 5);
        opts.label_override = b.truth;
        with_truth += matched_markov_error(b, run_algorithm1(b.trajs, opts), 5);
    }
    CHECK(with_truth <= with_kmeans * (1 + 1e-12));
}

TEST_CASE("output does not depend on the thread count")
{
    const std::vector<StateSpaceModel> centers{random_stable_model(3, 2, 1, {0.6, 0.9}, 1),
                                               random_stable_model(3, 2, 1, {0.6, 0.9}, 2)};
    const auto b = identical_clusters(centers, 5, 90, kNoise, 5);
    PipelineOptions opts;
    opts.n = 3;
    opts.K = 2;
    opts.L2 = 7;
    opts.seed = 99;
    opts.threads = 1;
    const auto one = run_algorithm1(b.trajs, opts);
    opts.threads = 4;
    const auto four = run_algorithm1(b.trajs, opts);
    CHECK(one.assignments == four.assignments);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(one.cluster_markov[k].matrix() == four.cluster_markov[k].matrix());
        CHECK(one.cluster_models[k].model.A() == four.cluster_models[k].model.A());
    }
    CHECK(one.diagnostics.kmeans_sse == four.diagnostics.kmeans_sse);
}

TEST_CASE("short trajectories are left out of refinement")
{
    const auto model = random_stable_model(2, 1, 1, {0.6, 0.9}, 8);
    std::vector<TrajectoryData> trajs;
    for (int i = 0; i < 3; ++i)
        trajs.push_back(simulate(model, 100, kNoise, 20 + i));
    for (int i = 0; i < 2; ++i)
        trajs.push_back(simulate(model, 10, kNoise, 40 + i));
    CHECK(eligible_for_refinement(trajs[0], 5));
    CHECK_FALSE(eligible_for_refinement(trajs[3], 5));

    PipelineOptions opts;
    opts.n = 2;
    opts.K = 1;
    opts.L2 = 5;
    const auto out = run_algorithm1(trajs, opts);
    CHECK(out.diagnostics.cluster_size[0] == 5);
    CHECK(out.diagnostics.cluster_pooled[0] == 3);
    const std::vector<TrajectoryData> long_only(trajs.begin(), trajs.begin() + 3);
    CHECK(out.cluster_markov[0].matrix() == ls_markov(long_only, 5).matrix());

    const std::vector<TrajectoryData> short_only(trajs.begin() + 3, trajs.end());
    try {
        run_algorithm1(short_only, opts);
        FAIL("expected InsufficientLengthError");
    } catch (const InsufficientLengthError& e) {
        CHECK(e.cluster() == 0);
        CHECK(std::string(e.what()).find("cluster 0") != std::string::npos);
    }
}

TEST_CASE("default clustering horizon")
{
    const auto siso = random_stable_model(2, 1, 1, {0.6, 0.9}, 1);
    const auto mimo = random_stable_model(2, 2, 1, {0.6, 0.9}, 1);
    CHECK(default_l1({simulate(siso, 100, kNoise, 1)}) == 8);
    CHECK(default_l1({simulate(siso, 100, kNoise, 1), simulate(siso, 9, kNoise, 2)}) == 4);
    CHECK(default_l1({simulate(mimo, 6, kNoise, 1)}) == 1);
    CHECK_THROWS_AS(default_l1({}), HorizonError);
}

TEST_CASE("invalid pipeline options")
{
    const auto model = random_stable_model(2, 1, 1, {0.6, 0.9}, 2);
    const std::vector<TrajectoryData> trajs{simulate(model, 60, kNoise, 1), simulate(model, 60, kNoise, 2)};
    PipelineOptions opts;
    opts.n = 2;
    opts.K = 1;
    opts.L2 = 4;
    CHECK_THROWS_AS(run_algorithm1(trajs, opts), HorizonError);
    opts.L2 = 5;
    opts.K = 0;
    CHECK_THROWS_AS(run_algorithm1(trajs, opts), DegenerateInputError);
    opts.K = 2;
    opts.label_override = std::vector<int>{0, 2};
    CHECK_THROWS_AS(run_algorithm1(trajs, opts), DegenerateInputError);
}
