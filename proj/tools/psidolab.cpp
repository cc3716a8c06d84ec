#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "psidolab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"psidolab: numerical probes for connection-based pseudo-differential calculus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    auto* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_dir, "output directory for reports");
    run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--threads", threads, "worker thread count");

    auto* validate = app.add_subcommand("validate", "check a config without running it");
    validate->add_option("config", config_path, "JSON experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            psidolab::runner::validate_config_file(config_path);
            std::printf("ok: %s\n", config_path.c_str());
            return 0;
        }
        psidolab::runner::RunOptions opts;
        opts.config_path = config_path;
        opts.out_dir = out_dir;
        if (seed_set) opts.seed = seed;
        opts.threads = threads;
        if (threads > 0) {
            const std::string v = std::to_string(threads);
            setenv("PSIDOLAB_THREADS", v.c_str(), 1);
        }
        const int rc = psidolab::runner::run_config(opts);
        std::printf("%s\n", rc == 0 ? "verdict: pass" : "verdict: fail");
        return rc;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
