#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sslnl/augment.hpp"
#include "sslnl/dataset.hpp"
#include "sslnl/eval.hpp"
#include "sslnl/lnl/gmm.hpp"
#include "sslnl/lnl/primitives.hpp"
#include "sslnl/nn/model.hpp"
#include "sslnl/nn/optim.hpp"
#include "sslnl/run_record.hpp"

namespace sslnl::lnl {

struct TrainConfig {
    int epochs = 40;
    int batch_size = 64;
    nn::OptimizerConfig optimizer;
    nn::LrSchedule lr_schedule = nn::LrSchedule::Constant;
    std::uint64_t seed = 0;
};

struct DivideMixConfig {
    int warmup_epochs = 10;
    int augmentations_per_sample = 2; // M
    double sharpen_temperature = 0.2; // T
    double mixup_alpha = 4.0;         // alpha
    double clean_threshold = 0.2;     // tau, on the GMM clean posterior
    double unlabeled_weight = 0.0;    // lambda_u: 0 for p in {0.5,0.6,0.7}, 0.25 at 0.8
    int batch_size = 128;
    // test hook: when false the unlabeled term is skipped outright instead of
    // multiplied by lambda_u (used to show lambda_u = 0 is a true no-op)
    bool include_unlabeled_loss = true;
};

// Holds the ground truth (corruption records) that trainers themselves must
// never read. Trainers hand it predictions and selections; it fills the
// metric columns of the RunRecord.
class GroundTruthEvaluator {
public:
    GroundTruthEvaluator(std::vector<CorruptionRecord> records, int num_classes);

    const std::vector<CorruptionRecord>& records() const { return records_; }
    int num_classes() const { return num_classes_; }

    MemorizationResult memorization(const std::vector<int>& train_preds) const;
    SelectionMetrics selection(const std::vector<char>& selected_mask) const;

private:
    std::vector<CorruptionRecord> records_;
    int num_classes_ = 0;
};

using Logger = std::function<void(const std::string&)>;

// Eval-mode pass in batches: predictions and per-sample CE losses on
// observed labels.
struct EvalPass {
    std::vector<int> predictions;
    std::vector<double> losses;
    double accuracy = 0.0;
};
EvalPass evaluate_split(nn::Model<float>& model, const TrainerView& view, int batch_size);

// Fraction of corrupted samples the model classifies as their observed
// (wrong) label; clean-label accuracy on those samples rides along.
MemorizationResult memorization_rate(nn::Model<float>& model, const DatasetSplit& split,
                                     int batch_size = 64);

// Plain cross-entropy on observed labels, horizontal-flip augmentation.
RunRecord train_cross_entropy(nn::Model<float>& model, const TrainerView& train_view,
                              const TrainerView& test_view, const TrainConfig& cfg,
                              const GroundTruthEvaluator* gt = nullptr, Logger log = {});

// Dual-network small-loss exchange; each net updates on its peer's
// selection. Reported accuracy and selection stats follow network A.
RunRecord train_coteaching(nn::Model<float>& model_a, nn::Model<float>& model_b,
                           const TrainerView& train_view, const TrainerView& test_view,
                           const TrainConfig& cfg, const CoteachingConfig& ct_cfg,
                           const GroundTruthEvaluator* gt = nullptr, Logger log = {});

// Warm-up, per-epoch GMM loss split (co-divide), co-refinement/co-guessing,
// MixMatch-style mixing; loss = CE(labeled) + lambda_u * MSE(unlabeled).
RunRecord train_dividemix(nn::Model<float>& model_a, nn::Model<float>& model_b,
                          const TrainerView& train_view, const TrainerView& test_view,
                          const TrainConfig& cfg, const DivideMixConfig& dm_cfg,
                          const GroundTruthEvaluator* gt = nullptr, Logger log = {});

} // namespace sslnl::lnl
