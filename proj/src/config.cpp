#include "lticlust/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lticlust/errors.hpp"

namespace lticlust {

using nlohmann::json;

namespace {

const std::set<std::string> kRequired = {
    "K",  "n",         "m",        "p",        "T_grid",   "N_grid",     "L1",
    "L2", "rho_range", "sigma_u",  "sigma_w1", "sigma_w2", "width_grid", "min_separation",
    "trials", "seed"};

const std::set<std::string> kOptional = {"N",        "metric_L", "restarts",
                                         "max_iter", "zero_d",   "include_feedthrough",
                                         "record_runtime", "threads", "out_dir"};

template <class T>
T get(const json& j, const char* key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <class T>
void get_opt(const json& j, const char* key, T& into)
{
    if (j.contains(key))
        into = get<T>(j, key);
}

}  // namespace

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (K < 1)
        fail("K must be >= 1");
    if (N < 1)
        fail("N must be >= 1");
    if (n < 1 || m < 1 || p < 1)
        fail("n, m, p must be >= 1");
    if (T_grid.empty() || N_grid.empty() || width_grid.empty())
        fail("T_grid, N_grid and width_grid must be nonempty");
    if (trials < 1)
        fail("trials must be >= 1");
    if (restarts < 1 || max_iter < 1 || threads < 1)
        fail("restarts, max_iter and threads must be >= 1");
    if (L1 < 1)
        fail("L1 must be >= 1");
    if (L2 < 2 * n + 1)
        fail("L2 must be >= 2n+1 = " + std::to_string(2 * n + 1));
    if (metric_L < 0 || metric_L > L2)
        fail("metric_L must lie in [0, L2]");
    for (Index T : T_grid) {
        if (T < L2 + m * (L2 + 1))
            fail("every T must be >= L2 + m(L2+1) = " + std::to_string(L2 + m * (L2 + 1)));
        if (T - L1 + 1 < m * (L1 + 1))
            fail("T = " + std::to_string(T) + " is too short for L1 = " + std::to_string(L1));
    }
    for (int N_val : N_grid)
        if (N_val < 1)
            fail("N_grid entries must be >= 1");
    if (!(rho_range.first > 0.0 && rho_range.first <= rho_range.second && rho_range.second < 1.0))
        fail("rho_range must satisfy 0 < lo <= hi < 1");
    if (noise.sigma_u < 0 || noise.sigma_w1 < 0 || noise.sigma_w2 < 0)
        fail("noise levels must be nonnegative");
    for (double w : width_grid) {
        if (w < 0)
            fail("widths must be nonnegative");
        if (K > 1 && !(min_separation > 2 * w))
            fail("min_separation must exceed twice every width");
    }
}

ExperimentConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kRequired.contains(key) && !kOptional.contains(key))
            throw ConfigError("unknown config key '" + key + "'");
    for (const auto& key : kRequired)
        if (!j.contains(key))
            throw ConfigError("missing config key '" + key + "'");

    ExperimentConfig c;
    c.K = get<int>(j, "K");
    c.n = get<Index>(j, "n");
    c.m = get<Index>(j, "m");
    c.p = get<Index>(j, "p");
    c.T_grid = get<std::vector<Index>>(j, "T_grid");
    c.N_grid = get<std::vector<int>>(j, "N_grid");
    c.L1 = get<Index>(j, "L1");
    c.L2 = get<Index>(j, "L2");
    const auto rho = get<std::vector<double>>(j, "rho_range");
    if (rho.size() != 2)
        throw ConfigError("rho_range must have two entries");
    c.rho_range = {rho[0], rho[1]};
    c.noise.sigma_u = get<double>(j, "sigma_u");
    c.noise.sigma_w1 = get<double>(j, "sigma_w1");
    c.noise.sigma_w2 = get<double>(j, "sigma_w2");
    c.width_grid = get<std::vector<double>>(j, "width_grid");
    c.min_separation = get<double>(j, "min_separation");
    c.trials = get<int>(j, "trials");
    c.seed = get<std::uint64_t>(j, "seed");

    c.N = c.N_grid.empty() ? 1 : c.N_grid.front();
    get_opt(j, "N", c.N);
    get_opt(j, "metric_L", c.metric_L);
    get_opt(j, "restarts", c.restarts);
    get_opt(j, "max_iter", c.max_iter);
    get_opt(j, "zero_d", c.zero_d);
    get_opt(j, "include_feedthrough", c.include_feedthrough);
    get_opt(j, "record_runtime", c.record_runtime);
    get_opt(j, "threads", c.threads);
    if (j.contains("out_dir"))
        c.out_dir = get<std::string>(j, "out_dir");

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c)
{
    json j = {
        {"K", c.K},
        {"N", c.N},
        {"n", c.n},
        {"m", c.m},
        {"p", c.p},
        {"T_grid", c.T_grid},
        {"N_grid", c.N_grid},
        {"L1", c.L1},
        {"L2", c.L2},
        {"metric_L", c.metric_L},
        {"rho_range", {c.rho_range.first, c.rho_range.second}},
        {"sigma_u", c.noise.sigma_u},
        {"sigma_w1", c.noise.sigma_w1},
        {"sigma_w2", c.noise.sigma_w2},
        {"width_grid", c.width_grid},
        {"min_separation", c.min_separation},
        {"trials", c.trials},
        {"seed", c.seed},
        {"restarts", c.restarts},
        {"max_iter", c.max_iter},
        {"zero_d", c.zero_d},
        {"include_feedthrough", c.include_feedthrough},
        {"record_runtime", c.record_runtime},
        {"threads", c.threads},
        {"out_dir", c.out_dir.string()},
    };
    return j.dump(2);
}

}  // namespace lticlust
