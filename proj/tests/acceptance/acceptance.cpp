#include "acceptance/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lticlust/clustering.hpp"
#include "lticlust/config.hpp"
#include "lticlust/errors.hpp"
#include "lticlust/estimation.hpp"
#include "lticlust/parallel.hpp"
#include "lticlust/pipeline.hpp"
#include "lticlust/realization.hpp"
#include "lticlust/report.hpp"
#include "lticlust/rng.hpp"
#include "lticlust/sweep.hpp"
#include "oracles.hpp"

namespace acceptance {

using namespace lticlust;

namespace {

constexpr std::uint64_t kSeed = 20250117;
const NoiseSpec kReferenceNoise{1.0, 0.15, 0.2};

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

double median(std::vector<double> v)
{
    return quantile(std::move(v), 0.5);
}

ExperimentConfig reference_config(const Options& opts)
{
    ExperimentConfig c;
    c.K = 3;
    c.n = 3;
    c.m = 1;
    c.p = 1;
    c.L1 = 4;
    c.L2 = 7;
    c.metric_L = 4;
    c.rho_range = {0.6, 0.9};
    c.noise = kReferenceNoise;
    c.min_separation = 0.5;
    c.width_grid = {0.0};
    c.restarts = 20;
    c.seed = kSeed;
    c.threads = opts.threads;
    return c;
}

// Zero noise, A strictly upper triangular (A^2 = 0), three clusters of four.
Outcome exact_recovery(const Options& opts)
{
    constexpr int kTrials = 20, K = 3, N = 4;
    constexpr Index T = 100, L2 = 5;
    std::vector<int> good(kTrials, 0);
    std::vector<double> worst(kTrials, 0.0);
    parallel_for(kTrials, opts.threads, [&](std::size_t trial) {
        Engine eng(derive_seed(kSeed, "exact-models", trial));
        std::vector<StateSpaceModel> centers;
        for (int k = 0; k < K; ++k) {
            MatrixXd A = MatrixXd::Zero(2, 2);
            A(0, 1) = gaussian_matrix(eng, 1, 1)(0, 0);
            const MatrixXd B = gaussian_matrix(eng, 2, 1);
            const MatrixXd C = gaussian_matrix(eng, 1, 2);
            const MatrixXd D = gaussian_matrix(eng, 1, 1);
            centers.emplace_back(A, B, C, D);
        }
        std::vector<TrajectoryData> trajs;
        std::vector<int> truth;
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < N; ++j) {
                trajs.push_back(simulate(centers[static_cast<std::size_t>(k)], T, NoiseSpec{1.0, 0, 0},
                                         derive_seed(kSeed, "exact-sim", trial, static_cast<std::uint64_t>(k * N + j))));
                truth.push_back(k);
            }
        PipelineOptions po;
        po.n = 2;
        po.K = K;
        po.L2 = L2;
        po.seed = derive_seed(kSeed, "exact-pipeline", trial);
        const auto out = run_algorithm1(trajs, po);
        const auto match = match_clusters(out.assignments, truth, K);
        double err = 0.0;
        for (int k = 0; k < K; ++k) {
            const auto& center = centers[static_cast<std::size_t>(match.permutation[static_cast<std::size_t>(k)])];
            const MatrixXd ref = oracle::markov_by_powers(center, L2);
            err = std::max(err, (out.cluster_markov[static_cast<std::size_t>(k)].matrix() - ref).norm());
        }
        worst[trial] = err;
        good[trial] = match.accuracy == 1.0 && err <= 1e-8;
    });
    const int passed = static_cast<int>(std::count(good.begin(), good.end(), 1));
    return {passed == kTrials, std::to_string(passed) + "/20 trials exact, worst Markov error " +
                                   fmt(*std::max_element(worst.begin(), worst.end()))};
}

Outcome ho_kalman_consistency(const Options&)
{
    int passed = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Index n = 1 + i % 4, m = 1 + (i / 4) % 2, p = 1 + (i / 8) % 2;
        const auto truth = random_stable_model(n, m, p, {0.6, 0.9}, derive_seed(kSeed, "hk", static_cast<std::uint64_t>(i)));
        const Index L = 2 * n + 1;
        const MatrixXd g = oracle::markov_by_powers(truth, L);
        double rel = std::numeric_limits<double>::infinity();
        try {
            const auto rep = ho_kalman(MarkovBlock(g, m), n);
            rel = (oracle::markov_by_powers(rep.model, L) - g).norm() / g.norm();
        } catch (const Error&) {
        }
        worst = std::max(worst, rel);
        passed += rel <= 1e-8;
    }
    return {passed == 50, std::to_string(passed) + "/50 models, worst relative error " + fmt(worst)};
}

Outcome least_squares_oracle(const Options&)
{
    int passed = 0;
    double worst = 0.0, worst_cond = 0.0;
    for (int i = 0; i < 50; ++i) {
        Engine eng(derive_seed(kSeed, "ls-shape", static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> small(1, 4), pair(1, 2), horizon(2, 6), len(60, 200);
        const Index n = small(eng), m = pair(eng), p = pair(eng), L = horizon(eng);
        const int N = small(eng);
        const auto model = random_stable_model(n, m, p, {0.6, 0.9}, derive_seed(kSeed, "ls-model", static_cast<std::uint64_t>(i)));
        std::vector<TrajectoryData> trajs;
        for (int j = 0; j < N; ++j)
            trajs.push_back(simulate(model, len(eng), kReferenceNoise,
                                     derive_seed(kSeed, "ls-sim", static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j))));
        const DataMatrices data = build_data_matrices(trajs, L);
        const MatrixXd ref = oracle::normal_equation_ls(data.Y, data.U);
        const LeastSquaresFit fit = ls_markov_fit(data, m);
        const double rel = (fit.estimate.matrix() - ref).norm() / ref.norm();
        worst = std::max(worst, rel);
        worst_cond = std::max(worst_cond, fit.condition());
        passed += rel <= 1e-8;
    }
    return {passed == 50, std::to_string(passed) + "/50 instances, worst relative gap " + fmt(worst) +
                              ", max cond(U) " + fmt(worst_cond)};
}

Outcome certificate(const Options&)
{
    int passed = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        Engine eng(derive_seed(kSeed, "cert", static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> pick_m(1, 3), pick_L(1, 6), pick_N(1, 4), pick_extra(0, 80);
        const Index m = pick_m(eng), L = pick_L(eng);
        const int N = pick_N(eng);
        const Index T = L + m * (L + 1) * 2 + pick_extra(eng);
        std::vector<TrajectoryData> trajs;
        for (int j = 0; j < N; ++j) {
            TrajectoryData tr;
            tr.inputs = gaussian_matrix(eng, m, T + 1);
            tr.outputs = MatrixXd::Zero(1, T);
            trajs.push_back(std::move(tr));
        }
        const DataMatrices data = build_data_matrices(trajs, L);
        const auto sets = page_partition(data.U, L, T - L + 1, N);
        const auto cert = min_singular_certificate(data.U, sets);
        tightest = std::min(tightest, cert.sigma_min - cert.bound);
        passed += cert.sigma_min >= cert.bound - 1e-9;
    }
    return {passed == 100, std::to_string(passed) + "/100 matrices, smallest slack " + fmt(tightest)};
}

Outcome scaling_slope(const Options& opts)
{
    const std::vector<int> Ns{1, 2, 4, 8, 16};
    const std::vector<Index> Ts{64, 128, 256, 512};
    constexpr int kTrials = 20;
    constexpr Index L = 4;
    const auto model = random_stable_model(3, 1, 1, {0.6, 0.9}, derive_seed(kSeed, "slope-model"));
    const MatrixXd G = markov_parameters(model, L).matrix();

    const std::size_t cells = Ns.size() * Ts.size();
    std::vector<double> err(cells * kTrials);
    parallel_for(err.size(), opts.threads, [&](std::size_t job) {
        const std::size_t cell = job / kTrials, trial = job % kTrials;
        const int N = Ns[cell / Ts.size()];
        const Index T = Ts[cell % Ts.size()];
        std::vector<TrajectoryData> trajs;
        for (int i = 0; i < N; ++i)
            trajs.push_back(simulate(model, T, kReferenceNoise,
                                     derive_seed(kSeed, "slope-sim", job, static_cast<std::uint64_t>(i))));
        err[job] = spectral_norm(ls_markov(trajs, L).matrix() - G);
    });

    // Least-squares line through (log N T_f, log median error).
    std::vector<double> x, y;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const int N = Ns[cell / Ts.size()];
        const Index T = Ts[cell % Ts.size()];
        x.push_back(std::log(static_cast<double>(N) * static_cast<double>(T - L + 1)));
        y.push_back(std::log(median({err.begin() + static_cast<std::ptrdiff_t>(cell * kTrials),
                                     err.begin() + static_cast<std::ptrdiff_t>((cell + 1) * kTrials)})));
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope >= -0.65 && slope <= -0.35, "log-log slope " + fmt(slope) + " over 20 cells"};
}

using Curves = std::map<int, std::vector<double>>;  // N -> median error along the T grid

Outcome grid_trends(const Options& opts)
{
    ExperimentConfig c = reference_config(opts);
    c.N_grid = {1, 2, 4, 8, 16};
    c.T_grid = {64, 128, 256, 512};
    c.trials = 20;
    c.validate();
    const auto rows = run_sweep(c);

    int failures = 0;
    std::map<std::pair<int, Index>, std::vector<double>> cell;
    for (const auto& r : rows) {
        failures += r.error_flag;
        cell[{r.N, r.T}].push_back(r.avg_markov_error);
    }
    Curves curves;
    for (int N : c.N_grid)
        for (Index T : c.T_grid)
            curves[N].push_back(median(cell[{N, T}]));

    bool pooled_below = true;
    for (std::size_t t = 0; t < c.T_grid.size(); ++t)
        pooled_below = pooled_below && curves[16][t] < curves[1][t];
    int worst_inversions = 0;
    for (const auto& [N, curve] : curves) {
        int inversions = 0;
        for (std::size_t t = 1; t < curve.size(); ++t)
            inversions += curve[t] > curve[t - 1];
        worst_inversions = std::max(worst_inversions, inversions);
    }
    std::ostringstream os;
    os << "N=16 below N=1 at every T: " << (pooled_below ? "yes" : "no")
       << ", max inversions per curve " << worst_inversions << ", medians N=1 [";
    for (double v : curves[1])
        os << ' ' << fmt(v);
    os << " ] N=16 [";
    for (double v : curves[16])
        os << ' ' << fmt(v);
    os << " ], failed trials " << failures;
    return {pooled_below && worst_inversions <= 1 && failures == 0, os.str()};
}

Outcome clustering_under_separation(const Options& opts)
{
    ExperimentConfig c = reference_config(opts);
    c.N_grid = {8};
    c.T_grid = {256};
    c.trials = 40;
    c.seed = derive_seed(kSeed, "separation");
    c.validate();
    int exact = 0;
    for (const auto& r : run_sweep(c))
        exact += r.error_flag == 0 && r.clustering_accuracy == 1.0;
    return {exact >= 38, std::to_string(exact) + "/40 trials with accuracy 1.0"};
}

Outcome width_trend(const Options& opts)
{
    ExperimentConfig c = reference_config(opts);
    const double half_sep = c.min_separation / 2.0;
    c.N_grid = {8};
    c.T_grid = {128};
    c.width_grid = {0.3 * half_sep, 0.9 * half_sep};
    c.trials = 20;
    c.seed = derive_seed(kSeed, "width");
    c.validate();
    std::vector<double> narrow, wide;
    for (const auto& r : run_sweep(c)) {
        const double acc = r.error_flag ? 0.0 : r.clustering_accuracy;
        (r.width == c.width_grid[0] ? narrow : wide).push_back(acc);
    }
    const double a_narrow = median(narrow), a_wide = median(wide);
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    return {a_narrow >= a_wide, "median accuracy " + fmt(a_narrow) + " at width " + fmt(c.width_grid[0]) +
                                    ", " + fmt(a_wide) + " at width " + fmt(c.width_grid[1]) +
                                    " (means " + fmt(mean(narrow)) + ", " + fmt(mean(wide)) + ")"};
}

std::string read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome determinism(const Options&)
{
    ExperimentConfig c = reference_config(Options{});
    c.N_grid = {2, 8};
    c.T_grid = {64, 256};
    c.width_grid = {0.0, 0.1};
    c.trials = 4;
    c.validate();
    const auto dir = std::filesystem::temp_directory_path() / "lticlust_acceptance_determinism";
    std::filesystem::create_directories(dir);
    std::vector<std::string> bytes;
    for (int threads : {1, 4, 1}) {
        c.threads = threads;
        const auto path = dir / ("run_" + std::to_string(bytes.size()) + ".csv");
        emit_csv(run_sweep(c), path);
        bytes.push_back(read_bytes(path));
    }
    std::filesystem::remove_all(dir);
    const bool same = bytes[0] == bytes[1] && bytes[0] == bytes[2];
    return {same, std::string(same ? "identical" : "different") + " CSV across threads {1, 4, 1}, " +
                      std::to_string(bytes[0].size()) + " bytes"};
}

Outcome kmeans_optimum(const Options& opts)
{
    int passed = 0;
    for (int i = 0; i < 30; ++i) {
        Engine eng(derive_seed(kSeed, "kmeans-instance", static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> count(4, 8), dim(1, 3);
        const int n = count(eng);
        const Index d = dim(eng);
        std::vector<VectorXd> pts;
        for (int j = 0; j < n; ++j)
            pts.push_back(gaussian_matrix(eng, d, 1).col(0));
        KMeansOptions ko;
        ko.K = 2;
        ko.threads = opts.threads;
        const double sse = kmeans(pts, ko, derive_seed(kSeed, "kmeans-run", static_cast<std::uint64_t>(i))).sse;
        const double best = oracle::exhaustive_kmeans_sse(pts, 2);
        passed += std::abs(sse - best) <= 1e-10 * std::max(1.0, best);
    }
    return {passed >= 29, std::to_string(passed) + "/30 instances at the exhaustive optimum"};
}

struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome(const Options&)> run;
};

}  // namespace

std::vector<CriterionResult> run_all(const Options& opts, std::ostream& log)
{
    const std::vector<Criterion> criteria{
        {1, "exact recovery", 10, exact_recovery},
        {2, "Ho-Kalman round trip", 5, ho_kalman_consistency},
        {3, "least-squares oracle", 5, least_squares_oracle},
        {4, "singular value certificate", 10, certificate},
        {5, "error scaling slope", 300, scaling_slope},
        {6, "error vs T and N trends", 300, grid_trends},
        {7, "clustering under separation", 120, clustering_under_separation},
        {8, "width robustness", 180, width_trend},
        {9, "determinism", 120, determinism},
        {10, "k-means global optimum", 5, kmeans_optimum},
    };

    std::vector<CriterionResult> results;
    for (const auto& c : criteria) {
        CriterionResult r;
        r.id = c.id;
        r.name = c.name;
        r.budget = c.budget;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(opts);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = r.seconds < r.budget;
        r.passed = o.ok && in_time;
        r.detail = o.detail;
        if (!in_time)
            r.detail += " (over budget)";
        log << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << ". " << r.name << ": "
            << r.detail << " [" << std::fixed << std::setprecision(2) << r.seconds << " s / "
            << std::setprecision(0) << r.budget << " s]" << std::defaultfloat << std::endl;
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace acceptance
