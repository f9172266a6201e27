#include "nlaffine/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"nlaffine: nonlinear affine processes with jumps"};
    app.require_subcommand(1);

    nlaffine::CommandOptions opt;
    std::string config;
    std::string surface;
    std::string estimate;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", opt.out_dir, "output directory")->default_val(".");
        sub->add_option("--threads", opt.threads, "worker threads (0: machine parallelism)")->default_val(0);
        sub->add_option("--seed", seed, "override the simulation seed");
        sub->add_flag("--force", opt.force, "compare despite mismatched config hashes");
        sub->add_flag("--interpolate", opt.interpolate, "interpolate when x0 is not a grid node");
    };

    auto* solve = app.add_subcommand("solve", "solve the nonlinear Kolmogorov PIDE on a grid");
    solve->add_option("--config", config, "experiment config (JSON)")->required();
    common(solve);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo lower bound over the vertices");
    simulate->add_option("--config", config, "experiment config (JSON)")->required();
    common(simulate);
    auto* check = app.add_subcommand("check", "run the condition checkers");
    check->add_option("--config", config, "experiment config (JSON)")->required();
    common(check);
    auto* compare = app.add_subcommand("compare", "compare a surface with a Monte Carlo estimate");
    compare->add_option("--surface", surface, "surface.csv")->required();
    compare->add_option("--estimate", estimate, "estimate.json")->required();
    common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nlaffine::kExitConfigError;
    }
    for (auto* sub : {solve, simulate, check, compare}) {
        if (sub->count("--seed") > 0) opt.seed = seed;
    }

    if (*solve) return nlaffine::cmd_solve(config, opt, std::cerr);
    if (*simulate) return nlaffine::cmd_simulate(config, opt, std::cerr);
    if (*check) return nlaffine::cmd_check(config, opt, std::cerr);
    return nlaffine::cmd_compare(surface, estimate, opt, std::cerr);
}
