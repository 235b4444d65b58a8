#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "needlet/errors.hpp"

namespace {

struct SharedFlags {
    std::string config_path;
    long seed = -1;
    bool seed_set = false;
    std::string out_dir;
    long threads = -1;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"needlet correlation laboratory"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"kernel-dump", "write kernel weight profiles and cubature grids"},
        {"corr-table", "analytic correlations over a scale/angle lattice"},
        {"decay-fit", "fit the log-correlation decay exponent across scales"},
        {"bound-check", "verify every |corr| against the decay envelope"},
        {"supercritical-check", "verify correlation persistence above threshold"},
        {"smhw-gap", "stereographic Mexican hat vs needlet profile gap"},
        {"mc-corr", "Monte Carlo coefficient correlation vs the analytic value"},
        {"clt", "whitened component normality diagnostics"},
        {"gamma", "variance-level estimator against its analytic target"},
    };

    SharedFlags flags;
    std::string chosen;
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", flags.config_path, "experiment config file")
            ->required();
        sub->add_option("--seed", flags.seed, "override [run] seed");
        sub->add_option("--out", flags.out_dir, "override [run] out directory");
        sub->add_option("--threads", flags.threads, "override [run] thread count");
        sub->callback([&chosen, name = name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // any argument problem is a validation error
    }

    try {
        needlet::tools::Config cfg = needlet::tools::Config::load(flags.config_path);
        for (const auto& [name, desc] : commands) {
            (void)desc;
            if (app.get_subcommand(name)->count("--seed") > 0) flags.seed_set = true;
        }
        if (flags.seed_set) cfg.set("run.seed", std::to_string(flags.seed));
        if (!flags.out_dir.empty()) cfg.set("run.out", flags.out_dir);
        if (flags.threads > 0) cfg.set("run.threads", std::to_string(flags.threads));
        return needlet::tools::run_command(chosen, cfg);
    } catch (const needlet::ConfigError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const needlet::RegimeError& e) {
        std::fprintf(stderr, "regime error: %s\n", e.what());
        return 3;
    } catch (const needlet::TruncationError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
