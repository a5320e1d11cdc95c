#include "sslnl/pretrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sslnl/ntxent.hpp"
#include "sslnl/nn/loss.hpp"
#include "sslnl/rng.hpp"

namespace sslnl {

namespace {

using nn::MatX;
using nn::Tensor4;

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    return idx;
}

} // namespace

nn::HeadSpec pretext_head(const PretrainConfig& cfg) {
    if (cfg.pretext == "rotation") return nn::HeadSpec::rotation();
    if (cfg.pretext == "jigsaw" || cfg.pretext == "jigmag")
        return nn::HeadSpec::permutation(cfg.permutation_count, 9);
    if (cfg.pretext == "contrastive") return nn::HeadSpec::projection(cfg.projection_dim);
    fail("config", "unknown pretext task: " + cfg.pretext);
}

void adapt_encoder_input(nn::EncoderConfig& cfg, const PretrainConfig& pre, int image_h, int image_w,
                         int image_c) {
    cfg.in_c = image_c;
    if (pre.pretext == "jigsaw" || pre.pretext == "jigmag") {
        cfg.in_h = pre.puzzle_patch_size;
        cfg.in_w = pre.puzzle_patch_size;
    } else {
        cfg.in_h = image_h;
        cfg.in_w = image_w;
    }
}

PretrainTrace pretrain_pretext(nn::Model<float>& model, const DatasetSplit& split,
                               const PretrainConfig& cfg, const PermutationSet* perms, lnl::Logger log) {
    check(!split.images.empty(), "config", "pretraining split is empty");
    check(cfg.epochs >= 0 && cfg.batch_size >= 1, "config", "bad pretraining budget");
    const bool is_puzzle = (cfg.pretext == "jigsaw" || cfg.pretext == "jigmag");
    if (is_puzzle) check(perms != nullptr, "config", cfg.pretext + " pretraining needs a permutation set");
    if (cfg.pretext == "contrastive")
        check(cfg.batch_size >= 2, "config", "contrastive batches need at least 2 images");

    const int in_h = model.encoder_config().in_h;
    const int in_w = model.encoder_config().in_w;
    const AugmentationPipeline strong = strong_pipeline(
        is_puzzle ? split.images[0].pixels.h : in_h, is_puzzle ? split.images[0].pixels.w : in_w);
    const AugmentationPipeline contrastive = contrastive_pipeline(in_h, in_w);
    const std::vector<double> factors = default_jigmag_factors();

    nn::Optimizer<float> opt(cfg.optimizer);
    opt.bind(model.parameters());
    Rng order_rng(derive_seed(cfg.seed, "pretrain-order"));
    const std::size_t n = split.images.size();

    PretrainTrace trace;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = nn::scheduled_lr(cfg.optimizer.learning_rate, cfg.lr_schedule, epoch, cfg.epochs);
        const std::vector<std::size_t> order = shuffled_indices(n, order_rng);
        double loss_sum = 0.0;
        long batches = 0, hits = 0, targets_seen = 0;

        for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - begin);
            if (cfg.pretext == "contrastive" && count < 2) break; // no negatives in a 1-image tail

            std::vector<Image> rows;
            std::vector<int> targets;
            if (cfg.pretext == "contrastive") {
                // [a_1..a_N, b_1..b_N]
                std::vector<Image> views_b;
                for (std::size_t i = 0; i < count; ++i) {
                    const LabeledImage& li = split.images[order[begin + i]];
                    PretextSample s = make_contrastive_pair(
                        li.pixels, contrastive,
                        derive_seed(cfg.seed, "pretext/e" + std::to_string(epoch) + "/" + li.id));
                    rows.push_back(std::move(s.inputs[0]));
                    views_b.push_back(std::move(s.inputs[1]));
                }
                for (Image& v : views_b) rows.push_back(std::move(v));
            } else {
                for (std::size_t i = 0; i < count; ++i) {
                    const LabeledImage& li = split.images[order[begin + i]];
                    const std::uint64_t s_seed =
                        derive_seed(cfg.seed, "pretext/e" + std::to_string(epoch) + "/" + li.id);
                    PretextSample s;
                    if (cfg.pretext == "rotation")
                        s = make_rotation_sample(li.pixels, strong, s_seed);
                    else if (cfg.pretext == "jigsaw")
                        s = make_jigsaw_sample(li.pixels, strong, *perms, s_seed, cfg.puzzle_patch_size);
                    else
                        s = make_jigmag_sample(li.pixels, strong, *perms, factors, s_seed,
                                               cfg.puzzle_patch_size);
                    targets.push_back(s.target);
                    for (Image& img : s.inputs) rows.push_back(std::move(img));
                }
            }

            std::vector<const Image*> ptrs(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) ptrs[i] = &rows[i];
            Tensor4<float> x = nn::batch_from_images<float>(ptrs);
            MatX<float> out = model.forward(x, /*train=*/true);

            opt.zero_grad();
            if (cfg.pretext == "contrastive") {
                NtXentResult<float> res = nt_xent_loss_grad<float>(out, static_cast<float>(cfg.ntxent_temperature));
                loss_sum += res.loss;
                model.backward(res.grad);
            } else {
                nn::CeResult<float> ce = nn::cross_entropy(out, targets);
                loss_sum += ce.mean_loss;
                const std::vector<int> preds = nn::argmax_rows(out);
                for (std::size_t i = 0; i < targets.size(); ++i) {
                    if (preds[i] == targets[i]) ++hits;
                    ++targets_seen;
                }
                model.backward(ce.dlogits);
            }
            opt.step(lr);
            ++batches;
        }

        trace.epoch_loss.push_back(batches ? loss_sum / batches : 0.0);
        trace.epoch_accuracy.push_back(targets_seen ? static_cast<double>(hits) / targets_seen
                                                    : std::nan(""));
        if (log)
            log("pretrain[" + cfg.pretext + "] epoch " + std::to_string(epoch) + " loss=" +
                std::to_string(trace.epoch_loss.back()));
    }
    return trace;
}

} // namespace sslnl
