#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sslnl/imageio.hpp"
#include "sslnl/nn/model.hpp"

namespace sslnl::nn {

constexpr int kFilterGridScale = 12; // nearest-neighbor upscale per kernel cell
constexpr int kFilterGridGap = 2;

inline int filter_grid_side(int count) {
    int side = 1;
    while (side * side < count) ++side;
    return side;
}

inline int filter_grid_pixels(int count, int kernel) {
    const int side = filter_grid_side(count);
    return side * kernel * kFilterGridScale + (side - 1) * kFilterGridGap;
}

// Tiles `count` seeded-random first-layer kernels into a square PNG. Each
// kernel is min-max normalized on its own; a constant kernel renders 0.5.
template <typename S>
void export_filter_grid(Model<S>& model, int count, const std::string& path, std::uint64_t seed) {
    Conv2d<S>& conv = model.encoder().first_conv();
    const int total = conv.out_channels();
    const int in_c = conv.in_channels();
    const int k = conv.kernel();
    check(count >= 1, "config", "filter count must be >= 1");
    check(count <= total, "config", "requested " + std::to_string(count) + " filters but the first layer has " +
                                        std::to_string(total));

    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "filter-grid"));
    rng.shuffle(order);
    order.resize(count);

    const int side = filter_grid_side(count);
    const int cell = k * kFilterGridScale;
    const int dim = filter_grid_pixels(count, k);
    const int out_c = (in_c == 3) ? 3 : 1;
    Image canvas(dim, dim, out_c);
    std::fill(canvas.v.begin(), canvas.v.end(), 1.0f); // white gaps

    const std::size_t ksize = static_cast<std::size_t>(in_c) * k * k;
    std::vector<double> rendered(static_cast<std::size_t>(out_c) * k * k);
    for (int fi = 0; fi < count; ++fi) {
        const S* w = conv.weight.value.data() + static_cast<std::size_t>(order[fi]) * ksize;
        for (int ch = 0; ch < out_c; ++ch)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    double v;
                    if (in_c == 3) {
                        v = w[(static_cast<std::size_t>(ch) * k + ky) * k + kx];
                    } else {
                        // average input channels into one gray plane
                        double acc = 0.0;
                        for (int ci = 0; ci < in_c; ++ci)
                            acc += w[(static_cast<std::size_t>(ci) * k + ky) * k + kx];
                        v = acc / in_c;
                    }
                    rendered[(static_cast<std::size_t>(ch) * k + ky) * k + kx] = v;
                }
        double lo = rendered[0], hi = rendered[0];
        for (double v : rendered) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const bool flat = (hi - lo) < 1e-12;
        const double scale = flat ? 0.0 : 1.0 / (hi - lo);

        const int oy = (fi / side) * (cell + kFilterGridGap);
        const int ox = (fi % side) * (cell + kFilterGridGap);
        for (int y = 0; y < cell; ++y)
            for (int x = 0; x < cell; ++x) {
                const int ky = y / kFilterGridScale, kx = x / kFilterGridScale;
                for (int ch = 0; ch < out_c; ++ch) {
                    const double v = rendered[(static_cast<std::size_t>(ch) * k + ky) * k + kx];
                    canvas.at(oy + y, ox + x, ch) = static_cast<float>(flat ? 0.5 : (v - lo) * scale);
                }
            }
    }
    save_png(path, canvas);
}

} // namespace sslnl::nn
