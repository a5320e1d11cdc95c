#pragma once

#include <cstddef>
#include <vector>

#include "sslnl/common.hpp"

namespace sslnl {

// Row-major H x W x C float image, intensities nominally in [0,1].
// Standardized patches (zero mean, unit std) are the one place values
// leave that range.
struct Image {
    int h = 0;
    int w = 0;
    int c = 1;
    std::vector<float> v;

    Image() = default;
    Image(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<std::size_t>(h_) * w_ * c_, 0.0f) {}

    float& at(int y, int x, int ch) { return v[(static_cast<std::size_t>(y) * w + x) * c + ch]; }
    float at(int y, int x, int ch) const { return v[(static_cast<std::size_t>(y) * w + x) * c + ch]; }

    std::size_t size() const { return v.size(); }
    bool same_shape(const Image& o) const { return h == o.h && w == o.w && c == o.c; }
};

Image resize_bilinear(const Image& img, int oh, int ow);
Image crop(const Image& img, int y0, int x0, int ch_, int cw_);
Image hflip(const Image& img);

// Exact 90-degree steps; k counterclockwise quarter turns in {0,1,2,3}.
Image rot90(const Image& img, int k);

// Arbitrary small-angle rotation, bilinear with edge clamp padding.
Image rotate_bilinear(const Image& img, double degrees);

Image gaussian_blur(const Image& img, double sigma);

Image adjust_brightness(const Image& img, float factor);
Image adjust_contrast(const Image& img, float factor);
Image adjust_saturation(const Image& img, float factor);
// PIL-style sharpness: factor 0 = smoothed, 1 = original, >1 = sharpened.
Image adjust_sharpness(const Image& img, float factor);
// Per-channel histogram equalization over 256 bins.
Image equalize(const Image& img);
// Per-channel linear stretch of [min,max] to [0,1].
Image autocontrast(const Image& img);

void clamp01(Image& img);

// Subtract per-image mean, divide by per-image std. std below `eps`
// (constant patch) yields all zeros instead of a blow-up.
void standardize(Image& img, double eps = 1e-6);

double mean_intensity(const Image& img);
double l2_distance(const Image& a, const Image& b);

} // namespace sslnl
