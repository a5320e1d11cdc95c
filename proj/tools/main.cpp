#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sslnl/experiment.hpp"

namespace {

sslnl::ExperimentConfig load_with_overrides(const std::string& config_path, std::uint64_t* seed,
                                            int* trials, bool paper_scale, const std::string& out) {
    sslnl::ExperimentConfig cfg = sslnl::load_experiment_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (paper_scale) cfg.paper_scale = true;
    if (!out.empty()) cfg.out = out;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-supervised pretraining + learning-with-noisy-labels experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, figure = "all";
    std::uint64_t seed = 0;
    int trials = 0;
    bool paper_scale = false, quiet = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "experiment config file (JSON)");
        if (needs_config) c->required();
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--trials", trials, "trial count override");
        sub->add_flag("--paper-scale", paper_scale, "use the full-scale training budgets");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_flag("--quiet", quiet, "suppress progress logging");
    };

    CLI::App* pretrain = app.add_subcommand("pretrain", "phase I: self-supervised pretext pretraining");
    add_common(pretrain, true);
    CLI::App* train = app.add_subcommand("train", "phase II: noisy-label training sweep");
    add_common(train, true);
    CLI::App* plot = app.add_subcommand("plot", "emit figures from summary CSVs");
    add_common(plot, false);
    plot->add_option("--figure", figure, "noise-curve | ce-bars | lnl-curves | all");
    CLI::App* report = app.add_subcommand("report", "aggregate trials and print the summary table");
    add_common(report, false);

    CLI11_PARSE(app, argc, argv);

    sslnl::lnl::Logger log;
    if (!quiet) log = [](const std::string& msg) { std::cerr << msg << "\n"; };

    try {
        auto* seed_opt = app.get_subcommands()[0]->get_option("--seed");
        auto* trials_opt = app.get_subcommands()[0]->get_option("--trials");
        std::uint64_t* seed_ptr = seed_opt->count() ? &seed : nullptr;
        int* trials_ptr = trials_opt->count() ? &trials : nullptr;

        if (pretrain->parsed()) {
            sslnl::cmd_pretrain(load_with_overrides(config_path, seed_ptr, trials_ptr, paper_scale, out_dir),
                                log);
        } else if (train->parsed()) {
            sslnl::cmd_train(load_with_overrides(config_path, seed_ptr, trials_ptr, paper_scale, out_dir),
                             log);
        } else if (plot->parsed()) {
            std::string dir = out_dir;
            if (dir.empty() && !config_path.empty())
                dir = sslnl::load_experiment_config(config_path).out;
            if (dir.empty()) sslnl::fail("usage", "plot needs --out <results dir> or --config");
            sslnl::cmd_plot(dir, figure, log);
        } else if (report->parsed()) {
            std::string dir = out_dir;
            if (dir.empty() && !config_path.empty())
                dir = sslnl::load_experiment_config(config_path).out;
            if (dir.empty()) sslnl::fail("usage", "report needs --out <results dir> or --config");
            std::cout << sslnl::cmd_report(dir);
        }
    } catch (const sslnl::Error& e) {
        std::cerr << "error " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
