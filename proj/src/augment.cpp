#include "sslnl/augment.hpp"

#include <cmath>

namespace sslnl {

namespace {

Image shift_clamped(const Image& img, int dy, int dx) {
    Image out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y) {
        const int sy = std::min(img.h - 1, std::max(0, y - dy));
        for (int x = 0; x < img.w; ++x) {
            const int sx = std::min(img.w - 1, std::max(0, x - dx));
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(sy, sx, ch);
        }
    }
    return out;
}

} // namespace

Image AugmentationPipeline::apply(const Image& img, Rng& rng) const {
    Image cur = img;
    for (const AugOp& op : ops) {
        // one gate draw per stochastic op, consumed whether or not it fires,
        // so downstream draws stay aligned across samples
        switch (op.kind) {
            case AugKind::HorizontalFlip: {
                const bool fire = rng.uniform() < op.prob;
                if (fire) cur = hflip(cur);
                break;
            }
            case AugKind::SmallRotation: {
                const double deg = rng.uniform(-op.a, op.a);
                cur = rotate_bilinear(cur, deg);
                clamp01(cur);
                break;
            }
            case AugKind::SharpnessAdjust: {
                const bool fire = rng.uniform() < op.prob;
                const double factor = rng.uniform(op.a, op.b);
                if (fire) cur = adjust_sharpness(cur, static_cast<float>(factor));
                break;
            }
            case AugKind::Equalize: {
                const bool fire = rng.uniform() < op.prob;
                if (fire) cur = equalize(cur);
                break;
            }
            case AugKind::Autocontrast: {
                const bool fire = rng.uniform() < op.prob;
                if (fire) cur = autocontrast(cur);
                break;
            }
            case AugKind::ColorJitter: {
                const bool fire = rng.uniform() < op.prob;
                const double s = op.a;
                const double fb = rng.uniform(std::max(0.0, 1.0 - s), 1.0 + s);
                const double fc = rng.uniform(std::max(0.0, 1.0 - s), 1.0 + s);
                const double fs = rng.uniform(std::max(0.0, 1.0 - s), 1.0 + s);
                if (fire) {
                    cur = adjust_brightness(cur, static_cast<float>(fb));
                    cur = adjust_contrast(cur, static_cast<float>(fc));
                    if (cur.c == 3) cur = adjust_saturation(cur, static_cast<float>(fs));
                }
                break;
            }
            case AugKind::GaussianBlur: {
                const bool fire = rng.uniform() < op.prob;
                const double sigma = rng.uniform(op.a, op.b);
                if (fire) {
                    cur = gaussian_blur(cur, sigma);
                    clamp01(cur);
                }
                break;
            }
            case AugKind::RandomShift: {
                const int m = static_cast<int>(op.a);
                const int dy = rng.uniform_int(2 * m + 1) - m;
                const int dx = rng.uniform_int(2 * m + 1) - m;
                if (dy != 0 || dx != 0) cur = shift_clamped(cur, dy, dx);
                break;
            }
            case AugKind::Resize:
                cur = resize_bilinear(cur, static_cast<int>(op.a), static_cast<int>(op.b));
                break;
            case AugKind::Standardize:
                standardize(cur);
                break;
        }
    }
    return cur;
}

Image AugmentationPipeline::apply(const Image& img, std::uint64_t sample_seed) const {
    Rng rng(sample_seed);
    return apply(img, rng);
}

AugmentationPipeline strong_pipeline(int out_h, int out_w) {
    AugmentationPipeline p;
    p.ops.push_back({AugKind::Resize, 1.0, static_cast<double>(out_h), static_cast<double>(out_w)});
    p.ops.push_back({AugKind::HorizontalFlip, 0.5, 0, 0});
    p.ops.push_back({AugKind::SmallRotation, 1.0, 10.0, 0});
    p.ops.push_back({AugKind::SharpnessAdjust, 0.5, 0.5, 2.0});
    p.ops.push_back({AugKind::Equalize, 0.5, 0, 0});
    p.ops.push_back({AugKind::Autocontrast, 0.5, 0, 0});
    return p;
}

AugmentationPipeline contrastive_pipeline(int out_h, int out_w, double jitter_strength,
                                          double jitter_prob, double blur_prob) {
    AugmentationPipeline p;
    p.ops.push_back({AugKind::Resize, 1.0, static_cast<double>(out_h), static_cast<double>(out_w)});
    p.ops.push_back({AugKind::HorizontalFlip, 0.5, 0, 0});
    p.ops.push_back({AugKind::ColorJitter, jitter_prob, jitter_strength, 0});
    p.ops.push_back({AugKind::GaussianBlur, blur_prob, 0.1, 1.5});
    return p;
}

AugmentationPipeline flip_pipeline() {
    AugmentationPipeline p;
    p.ops.push_back({AugKind::HorizontalFlip, 0.5, 0, 0});
    return p;
}

AugmentationPipeline light_shift_pipeline(int max_shift_px) {
    AugmentationPipeline p;
    p.ops.push_back({AugKind::HorizontalFlip, 0.5, 0, 0});
    p.ops.push_back({AugKind::RandomShift, 1.0, static_cast<double>(max_shift_px), 0});
    return p;
}

} // namespace sslnl
