// gameshort: run one experiment and report its checks.
//
//   gameshort line_check --config configs/line_check.cfg --steps 200 --x 0.5nu
//
// Exit status is 0 iff every check passed, 1 if a check failed, 2 on errors.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gameshort/experiments.hpp"

namespace ex = gameshort::experiments;

int main(int argc, char** argv) {
    CLI::App app{"Shortfall-risk experiments for game options on a binomial lattice"};
    app.footer(ex::config_reference());

    std::string experiment;
    std::string config_path;
    std::vector<std::size_t> steps;
    std::size_t grid = 0;
    std::vector<std::string> xs;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool quiet = false;

    std::string names;
    for (const auto& n : ex::experiment_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("experiment", experiment, "One of: " + names)->required();
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--steps", steps, "Lattice sizes (overrides steps)")->delimiter(',');
    app.add_option("--grid", grid, "Wealth grid points per node (overrides grid_points)");
    app.add_option("--x", xs, "Capitals, e.g. 0.02 or 0.5nu (overrides x_values)")->delimiter(',');
    app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for Monte Carlo and random instances");
    app.add_option("--threads", threads, "Worker threads, 0 = all cores");
    app.add_flag("-q,--quiet", quiet, "Only print failing checks");

    CLI11_PARSE(app, argc, argv);

    try {
        ex::ExperimentConfig cfg = config_path.empty() ? ex::ExperimentConfig{} : ex::load_config(config_path);
        cfg.experiment = experiment;
        if (!steps.empty()) cfg.steps = steps;
        if (grid) cfg.grid_points = grid;
        if (!xs.empty()) {
            cfg.x_values.clear();
            for (const auto& x : xs) cfg.x_values.push_back(ex::parse_capital(x));
        }
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (threads) cfg.threads = threads;

        const ex::ExperimentReport report = ex::run_experiment(cfg);
        std::size_t failed = 0;
        for (const auto& c : report.checks) {
            if (!c.pass) ++failed;
            if (quiet && c.pass) continue;
            std::printf("%-4s %s: %s %s %s%s\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                        ex::format_number(c.measured).c_str(), c.relation.c_str(),
                        ex::format_number(c.threshold).c_str(), c.empirical ? " (empirical)" : "");
        }
        std::printf("%s: %zu checks, %zu failed; results in %s\n", report.experiment.c_str(),
                    report.checks.size(), failed, cfg.output_dir.string().c_str());
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "gameshort: " << e.what() << '\n';
        return 2;
    }
}
