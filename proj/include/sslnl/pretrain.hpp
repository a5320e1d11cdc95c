#pragma once

#include <string>
#include <vector>

#include "sslnl/dataset.hpp"
#include "sslnl/lnl/train.hpp"
#include "sslnl/nn/model.hpp"
#include "sslnl/nn/optim.hpp"
#include "sslnl/pretext.hpp"

namespace sslnl {

struct PretrainConfig {
    std::string pretext = "rotation"; // rotation | jigsaw | jigmag | contrastive
    int epochs = 30;
    int batch_size = 64;
    nn::OptimizerConfig optimizer;
    nn::LrSchedule lr_schedule = nn::LrSchedule::CosineAnnealing;
    int puzzle_patch_size = 64;       // side of each puzzle patch after resize
    int permutation_count = 1000;     // P
    double ntxent_temperature = 0.07; // tau_c
    int projection_dim = 64;
    std::uint64_t seed = 0;
};

struct PretrainTrace {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_accuracy; // pretext-label accuracy; NaN rows for contrastive
};

// Builds the task head for `encoder_cfg` and trains the pretext objective on
// the images of `split` (labels never read). The trained model's encoder is
// what downstream training loads.
PretrainTrace pretrain_pretext(nn::Model<float>& model, const DatasetSplit& split,
                               const PretrainConfig& cfg, const PermutationSet* perms,
                               lnl::Logger log = {});

// Head spec matching a pretext name ("none" is invalid here).
nn::HeadSpec pretext_head(const PretrainConfig& cfg);

// Encoder input geometry for a pretext: puzzles consume patch-sized inputs,
// whole-image tasks consume the dataset image size.
void adapt_encoder_input(nn::EncoderConfig& cfg, const PretrainConfig& pre, int image_h, int image_w,
                         int image_c);

} // namespace sslnl
