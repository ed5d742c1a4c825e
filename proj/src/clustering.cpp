#include "lticlust/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "lticlust/errors.hpp"
#include "lticlust/parallel.hpp"
#include "lticlust/rng.hpp"

namespace lticlust {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

std::size_t count_distinct(const std::vector<VectorXd>& points)
{
    std::vector<const VectorXd*> order;
    order.reserve(points.size());
    for (const auto& p : points)
        order.push_back(&p);
    auto lex_less = [](const VectorXd* a, const VectorXd* b) {
        return std::lexicographical_compare(a->data(), a->data() + a->size(), b->data(),
                                            b->data() + b->size());
    };
    std::sort(order.begin(), order.end(), lex_less);
    auto same = [](const VectorXd* a, const VectorXd* b) { return *a == *b; };
    return static_cast<std::size_t>(std::unique(order.begin(), order.end(), same) - order.begin());
}

int nearest(const VectorXd& x, const std::vector<VectorXd>& centroids)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = (x - centroids[c]).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<int> assign(const std::vector<VectorXd>& points, const std::vector<VectorXd>& centroids)
{
    std::vector<int> labels(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        labels[i] = nearest(points[i], centroids);
    return labels;
}

std::vector<VectorXd> seed_plus_plus(const std::vector<VectorXd>& points, int K, Engine& eng)
{
    const std::size_t n = points.size();
    std::vector<VectorXd> centers;
    centers.reserve(static_cast<std::size_t>(K));
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(points[first(eng)]);

    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < K) {
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], (points[i] - centers.back()).squaredNorm());
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::uniform_real_distribution<double> pick(0.0, total);
        double r = pick(eng);
        std::size_t chosen = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0)
                continue;
            chosen = i;
            if (r < d2[i])
                break;
            r -= d2[i];
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

/// Recomputes means in place; refills empty clusters from the farthest point.
std::vector<VectorXd> update_centroids(const std::vector<VectorXd>& points, std::vector<int>& labels,
                                       int K)
{
    const Index dim = points.front().size();
    for (;;) {
        std::vector<VectorXd> sums(static_cast<std::size_t>(K), VectorXd::Zero(dim));
        std::vector<int> counts(static_cast<std::size_t>(K), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[static_cast<std::size_t>(labels[i])] += points[i];
            ++counts[static_cast<std::size_t>(labels[i])];
        }
        const auto empty = std::find(counts.begin(), counts.end(), 0);
        if (empty == counts.end()) {
            for (int c = 0; c < K; ++c)
                sums[static_cast<std::size_t>(c)] /= counts[static_cast<std::size_t>(c)];
            return sums;
        }
        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            if (counts[c] < 2)
                continue;
            const double d = (points[i] - sums[c] / counts[c]).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        labels[far] = static_cast<int>(empty - counts.begin());
    }
}

double sse_of(const std::vector<VectorXd>& points, const std::vector<int>& labels,
              const std::vector<VectorXd>& centroids)
{
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += (points[i] - centroids[static_cast<std::size_t>(labels[i])]).squaredNorm();
    return sse;
}

ClusteringResult lloyd(const std::vector<VectorXd>& points, int K, int max_iter, std::uint64_t seed)
{
    Engine eng(seed);
    ClusteringResult res;
    res.centroids = seed_plus_plus(points, K, eng);
    res.assignments = assign(points, res.centroids);

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        res.centroids = update_centroids(points, res.assignments, K);
        res.sse_history.push_back(sse_of(points, res.assignments, res.centroids));
        std::vector<int> next = assign(points, res.centroids);
        if (next == res.assignments) {
            converged = true;
            break;
        }
        res.assignments = std::move(next);
    }
    if (!converged) {
        res.centroids = update_centroids(points, res.assignments, K);
        res.sse_history.push_back(sse_of(points, res.assignments, res.centroids));
    }
    res.sse = res.sse_history.back();
    return res;
}

}  // namespace

ClusteringResult kmeans(const std::vector<VectorXd>& points, const KMeansOptions& opts,
                        std::uint64_t seed)
{
    if (opts.K < 1 || opts.restarts < 1 || opts.max_iter < 1)
        throw DegenerateInputError("k-means needs K, restarts, max_iter >= 1");
    if (points.size() < static_cast<std::size_t>(opts.K))
        throw DegenerateInputError("k-means: " + std::to_string(points.size()) +
                                   " points for K = " + std::to_string(opts.K));
    for (const auto& p : points)
        if (p.size() != points.front().size() || p.size() == 0)
            throw DegenerateInputError("k-means: points have mismatched dimensions");
    if (count_distinct(points) < static_cast<std::size_t>(opts.K))
        throw DegenerateInputError("k-means: fewer distinct points than K = " +
                                   std::to_string(opts.K));

    std::vector<ClusteringResult> runs(static_cast<std::size_t>(opts.restarts));
    parallel_for(runs.size(), opts.threads, [&](std::size_t r) {
        runs[r] = lloyd(points, opts.K, opts.max_iter, derive_seed(seed, "kmeans-restart", r));
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].sse < runs[best].sse)
            best = r;

    std::vector<double> restart_sse;
    for (const auto& run : runs)
        restart_sse.push_back(run.sse);

    ClusteringResult out = std::move(runs[best]);
    out.restarts_used = opts.restarts;
    out.best_restart = static_cast<int>(best);
    out.restart_sse = std::move(restart_sse);
    return out;
}

double assignment_sse(const std::vector<VectorXd>& points, const std::vector<int>& labels, int K)
{
    if (labels.size() != points.size())
        throw DegenerateInputError("assignment_sse: label count differs from point count");
    double sse = 0.0;
    for (int c = 0; c < K; ++c) {
        VectorXd mean = VectorXd::Zero(points.front().size());
        int count = 0;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (labels[i] == c) {
                mean += points[i];
                ++count;
            }
        if (count == 0)
            continue;
        mean /= count;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (labels[i] == c)
                sse += (points[i] - mean).squaredNorm();
    }
    return sse;
}

ClusterMatch match_clusters(const std::vector<int>& estimated, const std::vector<int>& truth, int K)
{
    if (estimated.size() != truth.size())
        throw DegenerateInputError("match_clusters: label vectors differ in length");
    if (K < 1)
        throw DegenerateInputError("match_clusters: K must be positive");
    const auto k = static_cast<std::size_t>(K);
    std::vector<std::vector<int>> confusion(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < estimated.size(); ++i) {
        if (estimated[i] < 0 || estimated[i] >= K || truth[i] < 0 || truth[i] >= K)
            throw DegenerateInputError("match_clusters: label outside [0, K)");
        ++confusion[static_cast<std::size_t>(estimated[i])][static_cast<std::size_t>(truth[i])];
    }

    ClusterMatch out;
    int agree = 0;
    if (K <= 8) {
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        int best = -1;
        do {
            int score = 0;
            for (std::size_t e = 0; e < k; ++e)
                score += confusion[e][static_cast<std::size_t>(perm[e])];
            if (score > best) {
                best = score;
                out.permutation = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        agree = best;
    } else {
        out.permutation.assign(k, -1);
        std::vector<bool> used(k, false);
        for (std::size_t step = 0; step < k; ++step) {
            int best = -1;
            std::size_t be = 0, bt = 0;
            for (std::size_t e = 0; e < k; ++e) {
                if (out.permutation[e] >= 0)
                    continue;
                for (std::size_t t = 0; t < k; ++t)
                    if (!used[t] && confusion[e][t] > best) {
                        best = confusion[e][t];
                        be = e;
                        bt = t;
                    }
            }
            out.permutation[be] = static_cast<int>(bt);
            used[bt] = true;
            agree += best;
        }
    }
    out.accuracy = estimated.empty() ? 1.0 : static_cast<double>(agree) / estimated.size();
    return out;
}

}  // namespace lticlust
