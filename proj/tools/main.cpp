// Command-line entry: scenario subcommands over the circlelab library.
#include <CLI11.hpp>

#include "scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"circlelab: numerical experiments with groups of circle diffeomorphisms"};
    app.require_subcommand(1);

    circlelab::cli::RunOptions opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON scenario config");
        sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", opts.seed, "master seed")
            ->each([&](const std::string&) { opts.seed_overridden = true; });
        sub->add_option("--threads", opts.threads, "worker thread cap (0 = hardware)");
        sub->add_option("--grid", opts.grid, "grid-size override");
        sub->add_flag("--json", opts.json_mirror, "also write JSON mirrors of the CSV tables");
    };

    for (const char* name :
         {"cascade", "distortion", "expansion", "flow", "walk", "spikes", "all"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        sub->callback([&, name]() { opts.scenario = name; });
    }

    CLI11_PARSE(app, argc, argv);
    return circlelab::cli::run_scenarios(opts);
}
