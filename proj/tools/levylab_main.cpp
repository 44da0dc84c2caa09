#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levylab/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<std::string> out;
    std::optional<int> workers;
};

void attach_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", flags.seed, "override the experiment seed");
    sub->add_option("--paths", flags.paths, "override the path count");
    sub->add_option("--out", flags.out, "override the output directory");
    sub->add_option("--workers", flags.workers, "worker thread count");
}

int run_kind(const CommonFlags& flags, levylab::ExperimentKind kind) {
    const auto cfg = levylab::parse_config_file(flags.config_path);
    levylab::RunOverrides ov;
    ov.seed = flags.seed;
    ov.n_paths = flags.paths;
    ov.out_dir = flags.out;
    ov.workers = flags.workers;
    ov.kind = kind;
    const auto outcome = levylab::run_experiment(cfg, ov);
    std::cout << "report: " << outcome.report_path << "\n";
    if (!outcome.stats_pass) {
        std::cout << "statistical checks FAILED\n";
        return 2;
    }
    std::cout << "statistical checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Monte Carlo laboratory for one-dimensional gradient dynamics driven "
        "by small heavy-tailed Levy noise"};
    app.require_subcommand(1);

    struct SubDef {
        const char* name;
        const char* help;
        levylab::ExperimentKind kind;
    };
    const SubDef defs[] = {
        {"analyze", "landscape, generator Q and exit-rate tables",
         levylab::ExperimentKind::Analyze},
        {"exitlaw", "first-exit times: exponentiality and exit splits",
         levylab::ExperimentKind::ExitLaw},
        {"transitions", "transition times and the empirical generator",
         levylab::ExperimentKind::Transitions},
        {"meta", "finite-dimensional convergence to the limiting chain",
         levylab::ExperimentKind::Metastability},
        {"shorttime", "short-time localization near the starting minimum",
         levylab::ExperimentKind::ShortTime},
        {"gauss", "Brownian-noise comparison on the Kramers scale",
         levylab::ExperimentKind::GaussianCompare},
    };

    std::vector<std::pair<CommonFlags, levylab::ExperimentKind>> jobs(
        std::size(defs));
    for (std::size_t i = 0; i < std::size(defs); ++i) {
        auto* sub = app.add_subcommand(defs[i].name, defs[i].help);
        jobs[i].second = defs[i].kind;
        attach_common(sub, jobs[i].first);
        auto* flags = &jobs[i].first;
        auto kind = defs[i].kind;
        sub->callback([flags, kind]() { std::exit(run_kind(*flags, kind)); });
    }

    CommonFlags vflags;
    auto* vsub = app.add_subcommand(
        "validate", "check the config against all parameter constraints");
    vsub->add_option("--config", vflags.config_path, "experiment config file")
        ->required();
    vsub->callback([&vflags]() {
        const auto cfg = levylab::parse_config_file(vflags.config_path);
        const auto violations = levylab::validate(cfg);
        if (violations.empty()) {
            std::cout << "config valid\n";
            std::exit(0);
        }
        for (const auto& v : violations) std::cout << "violated: " << v << "\n";
        std::exit(1);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const levylab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
