#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sslnl/common.hpp"
#include "sslnl/image.hpp"

namespace sslnl::nn {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using RowMajorMap = Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename S>
using ConstRowMajorMap = Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// NCHW batch tensor.
template <typename S>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<S> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, S(0)) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }
    std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }

    S* sample(int ni) { return data.data() + static_cast<std::size_t>(ni) * sample_size(); }
    const S* sample(int ni) const { return data.data() + static_cast<std::size_t>(ni) * sample_size(); }

    S& at(int ni, int ci, int y, int x) {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
    }
    S at(int ni, int ci, int y, int x) const {
        return data[((static_cast<std::size_t>(ni) * c + ci) * h + y) * w + x];
    }

    // sample ni viewed as channels x (h*w)
    RowMajorMap<S> sample_matrix(int ni) { return RowMajorMap<S>(sample(ni), c, static_cast<Eigen::Index>(plane_size())); }
    ConstRowMajorMap<S> sample_matrix(int ni) const {
        return ConstRowMajorMap<S>(sample(ni), c, static_cast<Eigen::Index>(plane_size()));
    }

    bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
    std::string shape_str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

// HWC float images -> NCHW batch.
template <typename S>
Tensor4<S> batch_from_images(const std::vector<const Image*>& images) {
    check(!images.empty(), "shape", "batch_from_images on empty batch");
    const Image& first = *images[0];
    Tensor4<S> out(static_cast<int>(images.size()), first.c, first.h, first.w);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const Image& img = *images[i];
        check(img.same_shape(first), "shape", "batch images must share one shape");
        for (int ch = 0; ch < img.c; ++ch)
            for (int y = 0; y < img.h; ++y)
                for (int x = 0; x < img.w; ++x)
                    out.at(static_cast<int>(i), ch, y, x) = static_cast<S>(img.at(y, x, ch));
    }
    return out;
}

// Named parameter array with its gradient buffer.
template <typename S>
struct Param {
    std::string name;
    std::vector<int> shape;
    std::vector<S> value;
    std::vector<S> grad;

    void init_shape(std::string name_, std::vector<int> shape_) {
        name = std::move(name_);
        shape = std::move(shape_);
        std::size_t total = 1;
        for (int d : shape) total *= static_cast<std::size_t>(d);
        value.assign(total, S(0));
        grad.assign(total, S(0));
    }
    std::size_t size() const { return value.size(); }
};

// Non-trainable state that still belongs in checkpoints (BN running stats).
template <typename S>
struct Buffer {
    std::string name;
    std::vector<S> value;
};

} // namespace sslnl::nn
