#include "sslnl/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sslnl {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline float sample_clamped(const Image& img, int y, int x, int ch) {
    return img.at(clampi(y, 0, img.h - 1), clampi(x, 0, img.w - 1), ch);
}

// Bilinear lookup at continuous (fy, fx) with edge clamp.
inline float bilinear(const Image& img, double fy, double fx, int ch) {
    const int y0 = static_cast<int>(std::floor(fy));
    const int x0 = static_cast<int>(std::floor(fx));
    const double dy = fy - y0;
    const double dx = fx - x0;
    const double v00 = sample_clamped(img, y0, x0, ch);
    const double v01 = sample_clamped(img, y0, x0 + 1, ch);
    const double v10 = sample_clamped(img, y0 + 1, x0, ch);
    const double v11 = sample_clamped(img, y0 + 1, x0 + 1, ch);
    return static_cast<float>((1 - dy) * ((1 - dx) * v00 + dx * v01) + dy * ((1 - dx) * v10 + dx * v11));
}

} // namespace

Image resize_bilinear(const Image& img, int oh, int ow) {
    check(oh > 0 && ow > 0, "shape", "resize target must be positive");
    check(img.h > 0 && img.w > 0, "shape", "resize source is empty");
    if (oh == img.h && ow == img.w) return img;
    Image out(oh, ow, img.c);
    const double sy = static_cast<double>(img.h) / oh;
    const double sx = static_cast<double>(img.w) / ow;
    for (int y = 0; y < oh; ++y) {
        // align pixel centers
        const double fy = (y + 0.5) * sy - 0.5;
        for (int x = 0; x < ow; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = bilinear(img, fy, fx, ch);
        }
    }
    return out;
}

Image crop(const Image& img, int y0, int x0, int ch_, int cw_) {
    check(ch_ > 0 && cw_ > 0, "shape", "crop size must be positive");
    check(y0 >= 0 && x0 >= 0 && y0 + ch_ <= img.h && x0 + cw_ <= img.w, "shape", "crop window out of bounds");
    Image out(ch_, cw_, img.c);
    for (int y = 0; y < ch_; ++y)
        for (int x = 0; x < cw_; ++x)
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(y0 + y, x0 + x, ch);
    return out;
}

Image hflip(const Image& img) {
    Image out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(y, img.w - 1 - x, ch);
    return out;
}

Image rot90(const Image& img, int k) {
    k = ((k % 4) + 4) % 4;
    if (k == 0) return img;
    Image out = (k == 2) ? Image(img.h, img.w, img.c) : Image(img.w, img.h, img.c);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            for (int ch = 0; ch < img.c; ++ch) {
                const float val = img.at(y, x, ch);
                switch (k) {
                    case 1: out.at(img.w - 1 - x, y, ch) = val; break;
                    case 2: out.at(img.h - 1 - y, img.w - 1 - x, ch) = val; break;
                    default: out.at(x, img.h - 1 - y, ch) = val; break;
                }
            }
        }
    }
    return out;
}

Image rotate_bilinear(const Image& img, double degrees) {
    const double rad = degrees * M_PI / 180.0;
    const double cs = std::cos(rad), sn = std::sin(rad);
    const double cy = (img.h - 1) / 2.0, cx = (img.w - 1) / 2.0;
    Image out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            // inverse map: output pixel pulled from rotated source position
            const double dy = y - cy, dx = x - cx;
            const double fy = cy + (sn * dx + cs * dy);
            const double fx = cx + (cs * dx - sn * dy);
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = bilinear(img, fy, fx, ch);
        }
    }
    return out;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    Image tmp(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * sample_clamped(img, y, x + i, ch);
                tmp.at(y, x, ch) = static_cast<float>(acc);
            }
    Image out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * sample_clamped(tmp, y + i, x, ch);
                out.at(y, x, ch) = static_cast<float>(acc);
            }
    return out;
}

Image adjust_brightness(const Image& img, float factor) {
    Image out = img;
    for (float& p : out.v) p *= factor;
    clamp01(out);
    return out;
}

Image adjust_contrast(const Image& img, float factor) {
    const double m = mean_intensity(img);
    Image out = img;
    for (float& p : out.v) p = static_cast<float>(m + factor * (p - m));
    clamp01(out);
    return out;
}

Image adjust_saturation(const Image& img, float factor) {
    if (img.c == 1) return img;
    Image out = img;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            double gray = 0.0;
            for (int ch = 0; ch < img.c; ++ch) gray += img.at(y, x, ch);
            gray /= img.c;
            for (int ch = 0; ch < img.c; ++ch)
                out.at(y, x, ch) = static_cast<float>(gray + factor * (img.at(y, x, ch) - gray));
        }
    clamp01(out);
    return out;
}

Image adjust_sharpness(const Image& img, float factor) {
    // PIL smoothing kernel [[1,1,1],[1,5,1],[1,1,1]]/13
    Image smooth(img.h, img.w, img.c);
    static const std::array<double, 9> k = {1, 1, 1, 1, 5, 1, 1, 1, 1};
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                double acc = 0.0;
                int ki = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) acc += k[ki++] * sample_clamped(img, y + dy, x + dx, ch);
                smooth.at(y, x, ch) = static_cast<float>(acc / 13.0);
            }
    Image out(img.h, img.w, img.c);
    for (std::size_t i = 0; i < img.v.size(); ++i)
        out.v[i] = smooth.v[i] + factor * (img.v[i] - smooth.v[i]);
    clamp01(out);
    return out;
}

Image equalize(const Image& img) {
    Image out = img;
    const int npix = img.h * img.w;
    for (int ch = 0; ch < img.c; ++ch) {
        std::array<int, 256> hist{};
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) {
                const int b = clampi(static_cast<int>(img.at(y, x, ch) * 255.0f + 0.5f), 0, 255);
                hist[b]++;
            }
        std::array<int, 256> cdf{};
        int run = 0;
        for (int b = 0; b < 256; ++b) {
            run += hist[b];
            cdf[b] = run;
        }
        int cdf_min = 0;
        for (int b = 0; b < 256; ++b)
            if (hist[b] > 0) {
                cdf_min = cdf[b];
                break;
            }
        if (cdf_min == npix) continue; // single-level channel, nothing to spread
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) {
                const int b = clampi(static_cast<int>(img.at(y, x, ch) * 255.0f + 0.5f), 0, 255);
                const double eq = static_cast<double>(cdf[b] - cdf_min) / (npix - cdf_min);
                out.at(y, x, ch) = static_cast<float>(eq);
            }
    }
    return out;
}

Image autocontrast(const Image& img) {
    Image out = img;
    for (int ch = 0; ch < img.c; ++ch) {
        float lo = 1.0f, hi = 0.0f;
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) {
                lo = std::min(lo, img.at(y, x, ch));
                hi = std::max(hi, img.at(y, x, ch));
            }
        if (hi - lo < 1e-6f) continue;
        const float scale = 1.0f / (hi - lo);
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) out.at(y, x, ch) = (img.at(y, x, ch) - lo) * scale;
    }
    return out;
}

void clamp01(Image& img) {
    for (float& p : img.v) p = std::min(1.0f, std::max(0.0f, p));
}

void standardize(Image& img, double eps) {
    double mean = 0.0;
    for (float p : img.v) mean += p;
    mean /= static_cast<double>(img.v.size());
    double var = 0.0;
    for (float p : img.v) var += (p - mean) * (p - mean);
    var /= static_cast<double>(img.v.size());
    const double sd = std::sqrt(var);
    if (sd < eps) {
        std::fill(img.v.begin(), img.v.end(), 0.0f);
        return;
    }
    for (float& p : img.v) p = static_cast<float>((p - mean) / sd);
}

double mean_intensity(const Image& img) {
    double m = 0.0;
    for (float p : img.v) m += p;
    return img.v.empty() ? 0.0 : m / static_cast<double>(img.v.size());
}

double l2_distance(const Image& a, const Image& b) {
    check(a.same_shape(b), "shape", "l2_distance on mismatched shapes");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = static_cast<double>(a.v[i]) - b.v[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace sslnl
