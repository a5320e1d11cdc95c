#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sslnl/lnl/train.hpp"
#include "sslnl/pretrain.hpp"

namespace sslnl {

struct DatasetConfig {
    std::string kind = "synthetic"; // "synthetic" | "folder"
    int num_classes = 4;
    int per_class = 500;
    int test_per_class = 125;
    int image_size = 32;
    std::string root;      // folder kind
    std::string test_root; // folder kind
    std::vector<std::string> class_names;

    std::string label() const { return kind == "synthetic" ? "synthetic" : root; }
};

struct ExperimentConfig {
    DatasetConfig dataset;
    std::vector<double> noise_rates = {0.6};
    std::string pretext = "none"; // none | rotation | jigsaw | jigmag | contrastive
    std::string lnl_method = "ce"; // ce | coteaching | dividemix
    std::string encoder = "tiny";  // tiny | resnet18like
    int trials = 3;
    std::uint64_t seed = 1;
    std::string out = "results";
    bool paper_scale = false;

    // optional explicit overrides; everything else follows the defaults table
    std::optional<int> pretrain_epochs, pretrain_batch;
    std::optional<double> pretrain_lr;
    std::optional<int> train_epochs, train_batch;
    std::optional<double> train_lr;
    std::optional<double> dm_lambda_u; // otherwise 0.25 at p >= 0.75, else 0
    std::optional<int> puzzle_patch_size;
};

ExperimentConfig load_experiment_config(const std::string& path);
std::string config_hash_hex(const ExperimentConfig& cfg);
void echo_config(const ExperimentConfig& cfg, const std::string& path);

// Phase settings resolved from the per-pretext defaults table, the
// paper-scale switch, and any explicit overrides.
PretrainConfig resolved_pretrain(const ExperimentConfig& cfg);
lnl::TrainConfig resolved_train(const ExperimentConfig& cfg, std::uint64_t run_seed);
lnl::CoteachingConfig resolved_coteaching(const ExperimentConfig& cfg, double noise_rate);
lnl::DivideMixConfig resolved_dividemix(const ExperimentConfig& cfg, double noise_rate);

// Phase I: pretext pretraining. Produces one checkpoint, or two from
// independent seeds when the configured LNL method runs dual networks.
// pretext "none" just writes a marker file.
std::vector<std::string> cmd_pretrain(const ExperimentConfig& cfg, lnl::Logger log = {});

// Phase II: noise injection + LNL training over every (noise rate, trial),
// RunRecords and summary CSVs under cfg.out.
void cmd_train(const ExperimentConfig& cfg, lnl::Logger log = {});

// figure: "noise-curve" | "ce-bars" | "lnl-curves" | "all"
void cmd_plot(const std::string& results_dir, const std::string& figure, lnl::Logger log = {});

// Aggregates trials.csv, rewrites aggregate.csv, returns the printable table.
std::string cmd_report(const std::string& results_dir);

} // namespace sslnl
