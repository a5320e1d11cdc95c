#include "sslnl/lnl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sslnl/nn/loss.hpp"

namespace sslnl::lnl {

namespace {

using nn::MatX;
using nn::Tensor4;

std::vector<int> labels_at(const TrainerView& view, const std::vector<std::size_t>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = view.observed_labels[idx[i]];
    return out;
}

// Per-sample augmentation keyed by (seed, tag, id): identical regardless of
// batch composition or worker layout.
Tensor4<float> augmented_batch(const TrainerView& view, const std::vector<std::size_t>& idx,
                               const AugmentationPipeline& pipeline, std::uint64_t seed,
                               const std::string& tag) {
    std::vector<Image> images(idx.size());
    std::vector<const Image*> ptrs(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        images[i] = pipeline.apply(*view.pixels[idx[i]], derive_seed(seed, tag + "/" + view.ids[idx[i]]));
        ptrs[i] = &images[i];
    }
    return nn::batch_from_images<float>(ptrs);
}

Tensor4<float> plain_batch(const TrainerView& view, std::size_t begin, std::size_t count) {
    std::vector<const Image*> ptrs(count);
    for (std::size_t i = 0; i < count; ++i) ptrs[i] = view.pixels[begin + i];
    return nn::batch_from_images<float>(ptrs);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    return idx;
}

// selected_count and the per-observed-class histogram are trainer outputs
// (observed labels only); precision/recall need the ground-truth records.
void fill_selection_columns(EpochRow& row, const TrainerView& view, const std::vector<char>& mask) {
    row.selected_count = std::count(mask.begin(), mask.end(), char(1));
    row.per_class_selected.assign(static_cast<std::size_t>(view.num_classes), 0);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) row.per_class_selected[static_cast<std::size_t>(view.observed_labels[i])]++;
}

void fill_ground_truth_columns(EpochRow& row, const GroundTruthEvaluator* gt,
                               const std::vector<int>& train_preds,
                               const std::vector<char>* selection_mask) {
    if (!gt) return;
    const MemorizationResult mem = gt->memorization(train_preds);
    row.memorization_rate = mem.rate;
    row.corrupted_clean_acc = mem.clean_acc;
    if (selection_mask) {
        const SelectionMetrics sel = gt->selection(*selection_mask);
        if (!sel.empty_selection) {
            row.selection_precision = sel.precision;
            row.selection_recall = sel.recall;
        }
    }
}

void require_compatible(nn::Model<float>& model, const TrainerView& train_view,
                        const TrainerView& test_view) {
    check(train_view.size() > 0, "config", "training split is empty");
    check(test_view.size() > 0, "config", "test split is empty");
    check(model.head_spec().out_dim == train_view.num_classes, "config",
          "model predicts " + std::to_string(model.head_spec().out_dim) + " classes but split has " +
              std::to_string(train_view.num_classes));
}

} // namespace

GroundTruthEvaluator::GroundTruthEvaluator(std::vector<CorruptionRecord> records, int num_classes)
    : records_(std::move(records)), num_classes_(num_classes) {}

MemorizationResult GroundTruthEvaluator::memorization(const std::vector<int>& train_preds) const {
    return memorization_from_predictions(train_preds, records_);
}

SelectionMetrics GroundTruthEvaluator::selection(const std::vector<char>& selected_mask) const {
    return selection_metrics(selected_mask, records_, num_classes_);
}

EvalPass evaluate_split(nn::Model<float>& model, const TrainerView& view, int batch_size) {
    EvalPass out;
    out.predictions.reserve(view.size());
    out.losses.reserve(view.size());
    long hits = 0;
    for (std::size_t begin = 0; begin < view.size(); begin += static_cast<std::size_t>(batch_size)) {
        const std::size_t count = std::min<std::size_t>(batch_size, view.size() - begin);
        Tensor4<float> x = plain_batch(view, begin, count);
        MatX<float> logits = model.forward(x, /*train=*/false);
        std::vector<int> labels(count);
        for (std::size_t i = 0; i < count; ++i) labels[i] = view.observed_labels[begin + i];
        nn::CeResult<float> ce = nn::cross_entropy(logits, labels);
        std::vector<int> preds = nn::argmax_rows(logits);
        for (std::size_t i = 0; i < count; ++i) {
            out.predictions.push_back(preds[i]);
            out.losses.push_back(static_cast<double>(ce.per_sample(static_cast<Eigen::Index>(i))));
            if (preds[i] == labels[i]) ++hits;
        }
    }
    out.accuracy = view.size() ? static_cast<double>(hits) / static_cast<double>(view.size()) : 0.0;
    return out;
}

MemorizationResult memorization_rate(nn::Model<float>& model, const DatasetSplit& split, int batch_size) {
    const TrainerView view = make_trainer_view(split);
    const EvalPass pass = evaluate_split(model, view, batch_size);
    return memorization_from_predictions(pass.predictions, split.records);
}

namespace {

// Accumulates predictions made during the training forwards themselves, so
// no second pass over the train split is needed for per-epoch metrics.
struct TrainPassStats {
    std::vector<int> predictions;
    long hits = 0;

    explicit TrainPassStats(std::size_t n) : predictions(n, -1) {}

    void absorb(const MatX<float>& logits, const std::vector<std::size_t>& idx,
                const std::vector<int>& labels) {
        const std::vector<int> preds = nn::argmax_rows(logits);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            predictions[idx[i]] = preds[i];
            if (preds[i] == labels[i]) ++hits;
        }
    }
    double accuracy() const {
        return predictions.empty() ? 0.0 : static_cast<double>(hits) / predictions.size();
    }
};

EpochRow post_epoch_row(int epoch, nn::Model<float>& model, nn::Model<float>* model_b,
                        const TrainPassStats& train_stats, const TrainerView& train_view,
                        const TrainerView& test_view, int batch_size, const GroundTruthEvaluator* gt,
                        const std::vector<char>* selection_mask) {
    EpochRow row;
    row.epoch = epoch;
    row.train_acc_observed = train_stats.accuracy();
    row.test_acc = evaluate_split(model, test_view, batch_size).accuracy;
    if (model_b) row.test_acc_b = evaluate_split(*model_b, test_view, batch_size).accuracy;
    if (selection_mask) fill_selection_columns(row, train_view, *selection_mask);
    fill_ground_truth_columns(row, gt, train_stats.predictions, selection_mask);
    return row;
}

} // namespace

RunRecord train_cross_entropy(nn::Model<float>& model, const TrainerView& train_view,
                              const TrainerView& test_view, const TrainConfig& cfg,
                              const GroundTruthEvaluator* gt, Logger log) {
    require_compatible(model, train_view, test_view);

    RunRecord record;
    record.meta.method = "ce";
    record.meta.seed = cfg.seed;
    if (cfg.epochs == 0) return record;

    nn::Optimizer<float> opt(cfg.optimizer);
    opt.bind(model.parameters());
    const AugmentationPipeline aug = flip_pipeline();
    Rng order_rng(derive_seed(cfg.seed, "order"));
    const std::size_t n = train_view.size();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = nn::scheduled_lr(cfg.optimizer.learning_rate, cfg.lr_schedule, epoch, cfg.epochs);
        const std::vector<std::size_t> order = shuffled_indices(n, order_rng);
        const std::string tag = "aug/e" + std::to_string(epoch);
        TrainPassStats stats(n);

        for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - begin);
            std::vector<std::size_t> idx(order.begin() + begin, order.begin() + begin + count);
            Tensor4<float> x = augmented_batch(train_view, idx, aug, cfg.seed, tag);
            MatX<float> logits = model.forward(x, /*train=*/true);
            const std::vector<int> labels = labels_at(train_view, idx);
            nn::CeResult<float> ce = nn::cross_entropy(logits, labels);
            stats.absorb(logits, idx, labels);
            opt.zero_grad();
            model.backward(ce.dlogits);
            opt.step(lr);
        }

        EpochRow row = post_epoch_row(epoch, model, nullptr, stats, train_view, test_view, cfg.batch_size, gt, nullptr);
        if (log)
            log("ce epoch " + std::to_string(epoch) + " train_acc=" + std::to_string(row.train_acc_observed) +
                " test_acc=" + std::to_string(row.test_acc));
        record.rows.push_back(std::move(row));
    }
    return record;
}

RunRecord train_coteaching(nn::Model<float>& model_a, nn::Model<float>& model_b,
                           const TrainerView& train_view, const TrainerView& test_view,
                           const TrainConfig& cfg, const CoteachingConfig& ct_cfg,
                           const GroundTruthEvaluator* gt, Logger log) {
    require_compatible(model_a, train_view, test_view);
    require_compatible(model_b, train_view, test_view);
    if (model_a.parameter_hash() == model_b.parameter_hash() && log)
        log("warning: co-teaching networks start from identical parameters (confirmation-bias risk)");

    RunRecord record;
    record.meta.method = "coteaching";
    record.meta.seed = cfg.seed;
    if (cfg.epochs == 0) return record;

    nn::Optimizer<float> opt_a(cfg.optimizer), opt_b(cfg.optimizer);
    opt_a.bind(model_a.parameters());
    opt_b.bind(model_b.parameters());
    const AugmentationPipeline aug = flip_pipeline();
    Rng order_rng(derive_seed(cfg.seed, "order"));
    const std::size_t n = train_view.size();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = nn::scheduled_lr(cfg.optimizer.learning_rate, cfg.lr_schedule, epoch, cfg.epochs);
        // schedule evaluated at the 1-based epoch number: a 10-epoch run with
        // T_k = 10 ends exactly at keep fraction 1 - tau_f
        const double keep = forget_rate(epoch + 1, ct_cfg);
        const std::vector<std::size_t> order = shuffled_indices(n, order_rng);
        const std::string tag = "aug/e" + std::to_string(epoch);
        std::vector<char> trained_on_mask(n, 0); // samples net A updated on (peer-selected)
        TrainPassStats stats(n);

        for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - begin);
            std::vector<std::size_t> idx(order.begin() + begin, order.begin() + begin + count);
            Tensor4<float> x = augmented_batch(train_view, idx, aug, cfg.seed, tag);
            const std::vector<int> labels = labels_at(train_view, idx);

            MatX<float> logits_a = model_a.forward(x, /*train=*/true);
            stats.absorb(logits_a, idx, labels);
            nn::CeResult<float> ce_a = nn::cross_entropy(logits_a, labels);
            std::vector<double> losses_a(count);
            for (std::size_t i = 0; i < count; ++i) losses_a[i] = ce_a.per_sample(static_cast<Eigen::Index>(i));
            const std::vector<std::size_t> sel_a = small_loss_select(losses_a, keep);

            MatX<float> logits_b = model_b.forward(x, /*train=*/true);
            nn::CeResult<float> ce_b = nn::cross_entropy(logits_b, labels);
            std::vector<double> losses_b(count);
            for (std::size_t i = 0; i < count; ++i) losses_b[i] = ce_b.per_sample(static_cast<Eigen::Index>(i));
            const std::vector<std::size_t> sel_b = small_loss_select(losses_b, keep);

            // each network updates on the subset chosen by its peer
            std::vector<float> weights_a(count, 0.0f);
            for (std::size_t i : sel_b) weights_a[i] = 1.0f / static_cast<float>(sel_b.size());
            nn::CeResult<float> grad_a = nn::cross_entropy(logits_a, labels, &weights_a);
            opt_a.zero_grad();
            model_a.backward(grad_a.dlogits);
            opt_a.step(lr);

            std::vector<float> weights_b(count, 0.0f);
            for (std::size_t i : sel_a) weights_b[i] = 1.0f / static_cast<float>(sel_a.size());
            nn::CeResult<float> grad_b = nn::cross_entropy(logits_b, labels, &weights_b);
            opt_b.zero_grad();
            model_b.backward(grad_b.dlogits);
            opt_b.step(lr);

            for (std::size_t i : sel_b) trained_on_mask[idx[i]] = 1;
        }

        EpochRow row = post_epoch_row(epoch, model_a, &model_b, stats, train_view, test_view, cfg.batch_size, gt,
                                      &trained_on_mask);
        if (log)
            log("coteaching epoch " + std::to_string(epoch) + " keep=" + std::to_string(keep) +
                " test_acc=" + std::to_string(row.test_acc));
        record.rows.push_back(std::move(row));
    }
    return record;
}

namespace {

struct GmmSplit {
    std::vector<double> posterior; // clean posterior per sample
    bool degenerate = false;
    bool has_fit = false;
    std::array<double, 2> means{{0.0, 0.0}};
    std::array<double, 2> weights{{0.0, 0.0}};
};

GmmSplit divide_by_gmm(const std::vector<double>& losses, std::uint64_t seed, Logger& log) {
    GmmSplit out;
    try {
        const GmmFit fit = fit_gmm_1d(min_max_normalize(losses), seed);
        out.posterior = fit.posterior_low;
        out.means = fit.means;
        out.weights = fit.weights;
        out.has_fit = true;
    } catch (const Error& e) {
        if (std::string(e.category()) != "degenerate-losses") throw;
        out.degenerate = true;
        out.posterior.assign(losses.size(), 1.0); // treat everything as clean
        if (log) log("warning: degenerate per-sample losses; epoch proceeds with all samples labeled");
    }
    return out;
}

MatX<float> onehot_row(int label, int k) {
    MatX<float> row = MatX<float>::Zero(1, k);
    row(0, label) = 1.0f;
    return row;
}

// Mean softmax prediction of `model` over M stochastic augmentations.
std::vector<std::vector<double>> mean_predictions(nn::Model<float>& model, const TrainerView& view,
                                                  const std::vector<std::size_t>& idx,
                                                  const AugmentationPipeline& aug, std::uint64_t seed,
                                                  const std::string& tag_prefix, int m_augs,
                                                  std::vector<std::vector<std::vector<double>>>* per_aug = nullptr) {
    const int k = view.num_classes;
    std::vector<std::vector<double>> mean(idx.size(), std::vector<double>(k, 0.0));
    if (per_aug) per_aug->assign(m_augs, {});
    for (int m = 0; m < m_augs; ++m) {
        Tensor4<float> x = augmented_batch(view, idx, aug, seed, tag_prefix + "/m" + std::to_string(m));
        MatX<float> probs = nn::softmax_rows(model.forward(x, /*train=*/false));
        if (per_aug) (*per_aug)[m].assign(idx.size(), std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < k; ++j) {
                const double p = probs(static_cast<Eigen::Index>(i), j);
                mean[i][j] += p / m_augs;
                if (per_aug) (*per_aug)[m][i][j] = p;
            }
    }
    return mean;
}

// One DivideMix training epoch for `net` using the peer's GMM posterior.
void dividemix_train_net(nn::Model<float>& net, nn::Model<float>& peer, nn::Optimizer<float>& opt,
                         const TrainerView& view, const std::vector<double>& peer_posterior,
                         const TrainConfig& cfg, const DivideMixConfig& dm, double lr, int epoch,
                         const std::string& net_tag, std::vector<char>* labeled_mask_out, Logger& log) {
    const std::size_t n = view.size();
    const int k = view.num_classes;
    std::vector<std::size_t> labeled, unlabeled;
    for (std::size_t i = 0; i < n; ++i) {
        if (peer_posterior[i] >= dm.clean_threshold)
            labeled.push_back(i);
        else
            unlabeled.push_back(i);
    }
    if (labeled.empty()) {
        if (log) log("warning: GMM split left no labeled samples for " + net_tag + "; treating all as labeled");
        labeled.resize(n);
        std::iota(labeled.begin(), labeled.end(), 0);
        unlabeled.clear();
    }
    if (labeled_mask_out) {
        labeled_mask_out->assign(n, 0);
        for (std::size_t i : labeled) (*labeled_mask_out)[i] = 1;
    }

    Rng rng(derive_seed(cfg.seed, "dm/" + net_tag + "/e" + std::to_string(epoch)));
    rng.shuffle(labeled);
    rng.shuffle(unlabeled);
    const AugmentationPipeline aug = light_shift_pipeline();
    const std::string tag = "dm-aug/" + net_tag + "/e" + std::to_string(epoch);

    std::size_t u_cursor = 0;
    const std::size_t bs = static_cast<std::size_t>(dm.batch_size);
    for (std::size_t begin = 0; begin < labeled.size(); begin += bs) {
        const std::size_t lcount = std::min(bs, labeled.size() - begin);
        std::vector<std::size_t> lidx(labeled.begin() + begin, labeled.begin() + begin + lcount);
        std::vector<std::size_t> uidx;
        for (std::size_t i = 0; i < lcount && !unlabeled.empty(); ++i) {
            uidx.push_back(unlabeled[u_cursor]);
            u_cursor = (u_cursor + 1) % unlabeled.size();
        }

        // co-refinement: blend observed labels with the net's own mean
        // prediction using the peer's clean posterior, then sharpen
        std::vector<std::vector<double>> l_mean =
            mean_predictions(net, view, lidx, aug, cfg.seed, tag + "/lab", dm.augmentations_per_sample);
        std::vector<std::vector<double>> l_targets(lidx.size());
        for (std::size_t i = 0; i < lidx.size(); ++i) {
            std::vector<double> onehot(k, 0.0);
            onehot[static_cast<std::size_t>(view.observed_labels[lidx[i]])] = 1.0;
            l_targets[i] = co_refine(onehot, peer_posterior[lidx[i]], l_mean[i], dm.sharpen_temperature);
        }

        // co-guessing: both networks' predictions over the same augmentations
        std::vector<std::vector<double>> u_targets(uidx.size());
        if (!uidx.empty()) {
            std::vector<std::vector<std::vector<double>>> per_aug_net, per_aug_peer;
            mean_predictions(net, view, uidx, aug, cfg.seed, tag + "/unl", dm.augmentations_per_sample,
                             &per_aug_net);
            mean_predictions(peer, view, uidx, aug, cfg.seed, tag + "/unl", dm.augmentations_per_sample,
                             &per_aug_peer);
            for (std::size_t i = 0; i < uidx.size(); ++i) {
                std::vector<std::vector<double>> preds_net(dm.augmentations_per_sample),
                    preds_peer(dm.augmentations_per_sample);
                for (int m = 0; m < dm.augmentations_per_sample; ++m) {
                    preds_net[m] = per_aug_net[m][i];
                    preds_peer[m] = per_aug_peer[m][i];
                }
                u_targets[i] = co_guess(preds_net, preds_peer, dm.sharpen_temperature);
            }
        }

        // assemble all augmented rows: labeled block then unlabeled block
        const int m_augs = dm.augmentations_per_sample;
        std::vector<Image> aug_rows;
        std::vector<std::vector<double>> row_targets;
        aug_rows.reserve((lidx.size() + uidx.size()) * m_augs);
        for (int m = 0; m < m_augs; ++m)
            for (std::size_t i = 0; i < lidx.size(); ++i) {
                aug_rows.push_back(aug.apply(*view.pixels[lidx[i]],
                                             derive_seed(cfg.seed, tag + "/lab/m" + std::to_string(m) + "/" +
                                                                       view.ids[lidx[i]])));
                row_targets.push_back(l_targets[i]);
            }
        const std::size_t labeled_rows = aug_rows.size();
        for (int m = 0; m < m_augs; ++m)
            for (std::size_t i = 0; i < uidx.size(); ++i) {
                aug_rows.push_back(aug.apply(*view.pixels[uidx[i]],
                                             derive_seed(cfg.seed, tag + "/unl/m" + std::to_string(m) + "/" +
                                                                       view.ids[uidx[i]])));
                row_targets.push_back(u_targets[i]);
            }

        // MixMatch input mixing: one lambda' per step, partners drawn over all rows
        const std::size_t total_rows = aug_rows.size();
        const double lam = draw_mixup_lambda(dm.mixup_alpha, rng);
        std::vector<std::size_t> partner(total_rows);
        std::iota(partner.begin(), partner.end(), 0);
        rng.shuffle(partner);

        std::vector<const Image*> ptrs(total_rows);
        std::vector<Image> mixed(total_rows);
        MatX<float> targets(static_cast<Eigen::Index>(total_rows), k);
        for (std::size_t r = 0; r < total_rows; ++r) {
            const Image& a = aug_rows[r];
            const Image& b = aug_rows[partner[r]];
            Image mix(a.h, a.w, a.c);
            for (std::size_t px = 0; px < mix.v.size(); ++px)
                mix.v[px] = static_cast<float>(lam * a.v[px] + (1.0 - lam) * b.v[px]);
            mixed[r] = std::move(mix);
            ptrs[r] = &mixed[r];
            for (int j = 0; j < k; ++j)
                targets(static_cast<Eigen::Index>(r), j) =
                    static_cast<float>(lam * row_targets[r][j] + (1.0 - lam) * row_targets[partner[r]][j]);
        }

        Tensor4<float> x = nn::batch_from_images<float>(ptrs);
        MatX<float> logits = net.forward(x, /*train=*/true);

        MatX<float> dlogits = MatX<float>::Zero(logits.rows(), logits.cols());
        MatX<float> logits_l = logits.topRows(static_cast<Eigen::Index>(labeled_rows));
        MatX<float> targets_l = targets.topRows(static_cast<Eigen::Index>(labeled_rows));
        nn::CeResult<float> ce = nn::soft_cross_entropy(logits_l, targets_l);
        dlogits.topRows(static_cast<Eigen::Index>(labeled_rows)) = ce.dlogits;

        const std::size_t unl_rows = total_rows - labeled_rows;
        if (unl_rows > 0 && dm.include_unlabeled_loss) {
            MatX<float> logits_u = logits.bottomRows(static_cast<Eigen::Index>(unl_rows));
            MatX<float> targets_u = targets.bottomRows(static_cast<Eigen::Index>(unl_rows));
            nn::CeResult<float> mse = nn::mse_prob(logits_u, targets_u);
            dlogits.bottomRows(static_cast<Eigen::Index>(unl_rows)) =
                mse.dlogits * static_cast<float>(dm.unlabeled_weight);
        }

        opt.zero_grad();
        net.backward(dlogits);
        opt.step(lr);
    }
}

} // namespace

RunRecord train_dividemix(nn::Model<float>& model_a, nn::Model<float>& model_b,
                          const TrainerView& train_view, const TrainerView& test_view,
                          const TrainConfig& cfg, const DivideMixConfig& dm_cfg,
                          const GroundTruthEvaluator* gt, Logger log) {
    require_compatible(model_a, train_view, test_view);
    require_compatible(model_b, train_view, test_view);
    check(dm_cfg.warmup_epochs >= 0, "config", "warmup epochs must be >= 0");
    check(dm_cfg.sharpen_temperature > 0.0, "config", "sharpening temperature must be positive");
    check(dm_cfg.mixup_alpha > 0.0, "config", "mixup alpha must be positive");
    check(dm_cfg.clean_threshold >= 0.0 && dm_cfg.clean_threshold <= 1.0, "config",
          "clean threshold must be in [0,1]");
    check(dm_cfg.unlabeled_weight >= 0.0, "config", "lambda_u must be >= 0");
    if (model_a.parameter_hash() == model_b.parameter_hash() && log)
        log("warning: dividemix networks start from identical parameters (confirmation-bias risk)");

    RunRecord record;
    record.meta.method = "dividemix";
    record.meta.seed = cfg.seed;
    if (cfg.epochs == 0) return record;

    nn::Optimizer<float> opt_a(cfg.optimizer), opt_b(cfg.optimizer);
    opt_a.bind(model_a.parameters());
    opt_b.bind(model_b.parameters());
    const AugmentationPipeline warmup_aug = flip_pipeline();
    Rng order_rng(derive_seed(cfg.seed, "order"));
    const std::size_t n = train_view.size();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = nn::scheduled_lr(cfg.optimizer.learning_rate, cfg.lr_schedule, epoch, cfg.epochs);

        if (epoch < dm_cfg.warmup_epochs) {
            // warm-up: plain cross-entropy on everything, both networks
            const std::vector<std::size_t> order = shuffled_indices(n, order_rng);
            const std::string tag = "aug/e" + std::to_string(epoch);
            TrainPassStats stats(n);
            for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - begin);
                std::vector<std::size_t> idx(order.begin() + begin, order.begin() + begin + count);
                Tensor4<float> x = augmented_batch(train_view, idx, warmup_aug, cfg.seed, tag);
                const std::vector<int> labels = labels_at(train_view, idx);
                bool first_net = true;
                for (auto [net, opt] : {std::pair{&model_a, &opt_a}, std::pair{&model_b, &opt_b}}) {
                    MatX<float> logits = net->forward(x, /*train=*/true);
                    if (first_net) stats.absorb(logits, idx, labels);
                    first_net = false;
                    nn::CeResult<float> ce = nn::cross_entropy(logits, labels);
                    opt->zero_grad();
                    net->backward(ce.dlogits);
                    opt->step(lr);
                }
            }
            EpochRow row =
                post_epoch_row(epoch, model_a, &model_b, stats, train_view, test_view, cfg.batch_size, gt, nullptr);
            if (log) log("dividemix warmup epoch " + std::to_string(epoch) + " test_acc=" + std::to_string(row.test_acc));
            record.rows.push_back(std::move(row));
            continue;
        }

        // co-divide: each network's loss GMM partitions the data for its peer
        EvalPass pass_a = evaluate_split(model_a, train_view, cfg.batch_size);
        EvalPass pass_b = evaluate_split(model_b, train_view, cfg.batch_size);
        GmmSplit gmm_a = divide_by_gmm(pass_a.losses, derive_seed(cfg.seed, "gmm-a/e" + std::to_string(epoch)), log);
        GmmSplit gmm_b = divide_by_gmm(pass_b.losses, derive_seed(cfg.seed, "gmm-b/e" + std::to_string(epoch)), log);

        std::vector<char> labeled_mask_a;
        dividemix_train_net(model_a, model_b, opt_a, train_view, gmm_b.posterior, cfg, dm_cfg, lr, epoch,
                            "net-a", &labeled_mask_a, log);
        dividemix_train_net(model_b, model_a, opt_b, train_view, gmm_a.posterior, cfg, dm_cfg, lr, epoch,
                            "net-b", nullptr, log);

        // mixed-input training passes carry no per-sample observed-label
        // predictions, so the train-set metrics come from a fresh eval pass
        const EvalPass post_pass = evaluate_split(model_a, train_view, cfg.batch_size);
        TrainPassStats stats(n);
        stats.predictions = post_pass.predictions;
        stats.hits = static_cast<long>(post_pass.accuracy * static_cast<double>(n) + 0.5);
        EpochRow row = post_epoch_row(epoch, model_a, &model_b, stats, train_view, test_view, cfg.batch_size, gt,
                                      &labeled_mask_a);
        if (gmm_a.has_fit) {
            row.has_gmm = true;
            row.gmm_means = gmm_a.means;
            row.gmm_weights = gmm_a.weights;
        }
        if (log)
            log("dividemix epoch " + std::to_string(epoch) + " labeled=" +
                std::to_string(row.selected_count) + " test_acc=" + std::to_string(row.test_acc));
        record.rows.push_back(std::move(row));
    }
    return record;
}

} // namespace sslnl::lnl
