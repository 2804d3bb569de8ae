#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ggr/numerics.hpp"
#include "ggr/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"ggr: Gabor transforms, Cheeger cuts, entire-function growth and phase-retrieval stability"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out_dir = ".";
    std::size_t threads = 0;
    std::uint64_t seed = 0;

    app.add_option("--config", config, "experiment configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (default: GGR_THREADS or 1)");
    auto* seed_opt = app.add_option("--seed", seed, "overrides every seed in the configuration");

    for (const char* name : ggr::commands)
        app.add_subcommand(name, std::string("run a ") + name + " experiment")->fallthrough();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (threads_opt->count() == 0)
        if (const char* env = std::getenv("GGR_THREADS"))
            threads = std::size_t(std::strtoull(env, nullptr, 10));
    ggr::set_thread_count(threads == 0 ? 1 : threads);

    ggr::RunContext ctx;
    ctx.out_dir = out_dir;
    if (seed_opt->count() > 0)
        ctx.seed = seed;

    const std::string command = app.get_subcommands().front()->get_name();
    return ggr::run_command(command, config, ctx, std::cout, std::cerr);
}
