#pragma once

#include <cstdint>
#include <vector>

#include "sslnl/image.hpp"
#include "sslnl/rng.hpp"

namespace sslnl {

enum class AugKind {
    HorizontalFlip,  // prob
    SmallRotation,   // max_deg, bilinear with edge clamp
    SharpnessAdjust, // prob, factor in [lo,hi]
    Equalize,        // prob
    Autocontrast,    // prob
    ColorJitter,     // prob, strength (brightness/contrast, + saturation when C=3)
    GaussianBlur,    // prob, sigma in [lo,hi]
    RandomShift,     // max_px, edge clamp
    Resize,          // h, w
    Standardize      // per-image mean/std
};

struct AugOp {
    AugKind kind;
    double prob = 1.0;
    double a = 0.0; // kind-specific: max_deg / lo / h / strength
    double b = 0.0; // kind-specific: hi / w
};

// Ordered op list; application with a fixed per-sample seed is deterministic.
struct AugmentationPipeline {
    std::vector<AugOp> ops;

    Image apply(const Image& img, Rng& rng) const;
    Image apply(const Image& img, std::uint64_t sample_seed) const;
};

// flips, small rotations (10 deg), sharpness, equalization, auto contrast
AugmentationPipeline strong_pipeline(int out_h, int out_w);
// flips, color jitter, Gaussian blur
AugmentationPipeline contrastive_pipeline(int out_h, int out_w, double jitter_strength = 0.4,
                                          double jitter_prob = 0.8, double blur_prob = 0.5);
// horizontal flip only (noisy-label training stages)
AugmentationPipeline flip_pipeline();
// flip + small shift, the stochastic augmentation pair source for DivideMix
AugmentationPipeline light_shift_pipeline(int max_shift_px = 2);

} // namespace sslnl
