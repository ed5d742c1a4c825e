// lticlust: command-line front end for scenario generation, Monte-Carlo
// sweeps, plotting and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance/acceptance.hpp"
#include "lticlust/config.hpp"
#include "lticlust/errors.hpp"
#include "lticlust/report.hpp"
#include "lticlust/rng.hpp"
#include "lticlust/scenario.hpp"
#include "lticlust/sweep.hpp"

namespace fs = std::filesystem;
using namespace lticlust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

nlohmann::json matrix_json(const MatrixXd& M)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < M.cols(); ++j)
            row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json model_json(const StateSpaceModel& model)
{
    return {{"A", matrix_json(model.A())},
            {"B", matrix_json(model.B())},
            {"C", matrix_json(model.C())},
            {"D", matrix_json(model.D())}};
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<int> trials;
};

ExperimentConfig resolve(const Common& c)
{
    ExperimentConfig config = load_config(c.config_path);
    if (c.seed)
        config.seed = *c.seed;
    if (c.out)
        config.out_dir = *c.out;
    if (c.threads)
        config.threads = *c.threads;
    if (c.trials)
        config.trials = *c.trials;
    config.validate();
    return config;
}

int cmd_generate(const Common& c)
{
    const ExperimentConfig config = resolve(c);
    ensure_dir(config.out_dir);
    nlohmann::json doc = nlohmann::json::array();
    for (std::size_t w = 0; w < config.width_grid.size(); ++w) {
        const ClusterScenario sc = generate_scenario(config, config.width_grid[w], config.N,
                                                     derive_seed(config.seed, "scenario", w, 0));
        nlohmann::json entry;
        entry["width"] = sc.width;
        entry["horizon"] = sc.horizon;
        // JSON has no infinity; K = 1 reports null.
        entry["separation"] =
            std::isfinite(sc.separation) ? nlohmann::json(sc.separation) : nlohmann::json(nullptr);
        entry["truth"] = sc.truth;
        for (const auto& m : sc.centers)
            entry["centers"].push_back(model_json(m));
        for (const auto& m : sc.system_models)
            entry["systems"].push_back(model_json(m));
        doc.push_back(entry);
    }
    const fs::path path = config.out_dir / "scenario.json";
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return kExitOk;
}

int cmd_run(const Common& c)
{
    const ExperimentConfig config = resolve(c);
    ensure_dir(config.out_dir);
    const auto rows = run_sweep(config);
    const fs::path path = config.out_dir / "results.csv";
    emit_csv(rows, path);
    int failed = 0;
    for (const auto& r : rows)
        failed += r.error_flag;
    std::cout << "wrote " << rows.size() << " rows (" << failed << " failed trials) to "
              << path.string() << '\n';
    return kExitOk;
}

int cmd_plot(const std::string& csv, const std::string& out_dir)
{
    const auto rows = read_csv(csv);
    for (const auto& p : emit_plots(rows, out_dir))
        std::cout << "wrote " << p.string() << '\n';
    return kExitOk;
}

int cmd_validate(int threads)
{
    acceptance::Options opts;
    opts.threads = threads;
    const auto results = acceptance::run_all(opts, std::cout);
    for (const auto& r : results)
        if (!r.passed)
            return kExitRuntime;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Clustered LTI system identification: experiments and validation"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", common.seed, "override master seed");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--trials", common.trials, "override trials per grid cell")
            ->check(CLI::PositiveNumber);
    };

    auto* generate = app.add_subcommand("generate", "write scenario.json for each width");
    add_common(generate);
    auto* run = app.add_subcommand("run", "run the sweep and write results.csv");
    add_common(run);

    std::string csv_path, plot_out = "plots";
    auto* plot = app.add_subcommand("plot", "render SVG plots and summary.csv from results.csv");
    plot->add_option("csv", csv_path, "results CSV")->required();
    plot->add_option("--out", plot_out, "output directory");

    int validate_threads = 1;
    auto* validate = app.add_subcommand("validate", "run the acceptance suite");
    validate->add_option("--threads", validate_threads, "worker threads")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*generate)
            return cmd_generate(common);
        if (*run)
            return cmd_run(common);
        if (*plot)
            return cmd_plot(csv_path, plot_out);
        return cmd_validate(validate_threads);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
