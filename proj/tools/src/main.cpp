#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cvfp/error.hpp"
#include "cvfp_cli/runner.hpp"

namespace {

constexpr int kExitUsage = 64;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Confined kinetic particle and grid toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 1;

    for (const char* name : {"simulate-linear", "simulate-mckean", "solve-vfp", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "overrides run.seed");
        sub->add_option("--out", out_dir, "output directory (default: run.out)");
        sub->add_option("--threads", threads, "worker threads; results do not depend on it")
            ->check(CLI::Range(1, 1024));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const auto cmd = cvfp::cli::parse_subcommand(chosen->get_name());
    if (!cmd) return kExitUsage;

    try {
        const cvfp::cli::ScenarioConfig cfg = cvfp::cli::parse_config(config_path);
        cvfp::cli::RunOptions opts;
        opts.threads = threads;
        if (chosen->count("--seed") > 0) opts.seed = seed;
        const cvfp::cli::OutputBundle bundle = cvfp::cli::run_scenario(cfg, *cmd, opts);
        const std::string dir = out_dir.empty() ? cfg.run.out : out_dir;
        cvfp::cli::write_bundle(bundle, dir);
        std::cout << bundle.report.summary_table();
        std::cout << "bundle written to " << dir << "\n";
        return bundle.exit_code();
    } catch (const cvfp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
