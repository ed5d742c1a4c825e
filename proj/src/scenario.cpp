#include "lticlust/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lticlust/errors.hpp"
#include "lticlust/rng.hpp"

namespace lticlust {

namespace {

constexpr int kMaxConsecutiveRejections = 1000;
constexpr int kBisectionSteps = 40;

StateSpaceModel perturb_within(const StateSpaceModel& center, double width, Index L,
                               bool include_feedthrough, std::uint64_t seed)
{
    Engine eng(seed);
    MatrixXd dB = gaussian_matrix(eng, center.n(), center.m());
    MatrixXd dC = gaussian_matrix(eng, center.p(), center.n());
    const double scale = std::sqrt(dB.squaredNorm() + dC.squaredNorm());
    dB /= scale;
    dC /= scale;

    auto at = [&](double s) {
        return StateSpaceModel(center.A(), center.B() + s * dB, center.C() + s * dC, center.D());
    };
    auto dist = [&](double s) {
        return impulse_response_distance(center, at(s), L, include_feedthrough);
    };
    auto in_band = [&](double d) { return d >= 0.8 * width && d <= width; };

    double lo = 0.0;
    double hi = width;
    double d_hi = dist(hi);
    for (int grow = 0; grow < 60 && d_hi < 0.8 * width; ++grow) {
        lo = hi;
        hi *= 2.0;
        d_hi = dist(hi);
    }
    if (in_band(d_hi))
        return at(hi);
    if (d_hi < 0.8 * width)
        return at(lo);  // direction barely moves the response; stay inside the width

    for (int step = 0; step < kBisectionSteps; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double d = dist(mid);
        if (in_band(d))
            return at(mid);
        (d < 0.8 * width ? lo : hi) = mid;
    }
    return at(lo);
}

}  // namespace

ClusterScenario generate_scenario(const ExperimentConfig& config, double width, int per_cluster,
                                  std::uint64_t seed)
{
    if (width < 0)
        throw ConfigError("width must be nonnegative");
    if (config.K > 1 && !(config.min_separation > 2 * width))
        throw ConfigError("min_separation must exceed twice the width");
    if (per_cluster < 1)
        throw ConfigError("need at least one system per cluster");

    ClusterScenario sc;
    sc.width = width;
    sc.horizon = config.L1;
    sc.separation = std::numeric_limits<double>::infinity();

    int rejections = 0;
    for (std::uint64_t attempt = 0; static_cast<int>(sc.centers.size()) < config.K; ++attempt) {
        StateSpaceModel candidate =
            random_stable_model(config.n, config.m, config.p, config.rho_range,
                                derive_seed(seed, "center", attempt), config.zero_d);
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& c : sc.centers)
            nearest = std::min(nearest, impulse_response_distance(candidate, c, config.L1,
                                                                  config.include_feedthrough));
        if (nearest < config.min_separation) {
            if (++rejections >= kMaxConsecutiveRejections)
                throw InfeasibleSeparationError(
                    "could not place center " + std::to_string(sc.centers.size()) + " at distance >= " +
                    std::to_string(config.min_separation) + " after " +
                    std::to_string(kMaxConsecutiveRejections) + " consecutive draws");
            continue;
        }
        rejections = 0;
        sc.separation = std::min(sc.separation, nearest);
        sc.centers.push_back(std::move(candidate));
    }

    for (int k = 0; k < config.K; ++k) {
        const auto& center = sc.centers[static_cast<std::size_t>(k)];
        for (int j = 0; j < per_cluster; ++j) {
            const std::uint64_t index = static_cast<std::uint64_t>(k) * 1'000'003ULL + j;
            if (width == 0.0)
                sc.system_models.push_back(center);
            else
                sc.system_models.push_back(perturb_within(center, width, config.L1,
                                                          config.include_feedthrough,
                                                          derive_seed(seed, "perturb", index)));
            sc.truth.push_back(k);
        }
    }
    return sc;
}

}  // namespace lticlust
