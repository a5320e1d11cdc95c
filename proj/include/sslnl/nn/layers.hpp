#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sslnl/nn/tensor.hpp"
#include "sslnl/rng.hpp"

namespace sslnl::nn {

template <typename S>
void he_normal_fill(std::vector<S>& w, int fan_in, Rng& rng) {
    const double std_dev = std::sqrt(2.0 / fan_in);
    for (S& v : w) v = static_cast<S>(rng.normal(0.0, std_dev));
}

template <typename S>
class Conv2d {
public:
    Conv2d() = default;

    void configure(std::string name, int in_c, int out_c, int ksize, int stride) {
        in_c_ = in_c;
        out_c_ = out_c;
        k_ = ksize;
        stride_ = stride;
        pad_ = ksize / 2;
        weight.init_shape(name + ".weight", {out_c, in_c, ksize, ksize});
        bias.init_shape(name + ".bias", {out_c});
    }

    void init(Rng& rng) { he_normal_fill(weight.value, in_c_ * k_ * k_, rng); }

    int out_h(int h) const { return (h + 2 * pad_ - k_) / stride_ + 1; }
    int out_w(int w) const { return (w + 2 * pad_ - k_) / stride_ + 1; }
    int out_channels() const { return out_c_; }
    int in_channels() const { return in_c_; }
    int kernel() const { return k_; }

    Tensor4<S> forward(const Tensor4<S>& x) {
        if (x.c != in_c_)
            fail("shape", weight.name + ": expected " + std::to_string(in_c_) + " input channels, got " +
                              std::to_string(x.c));
        in_shape_ = {x.n, x.c, x.h, x.w};
        const int ho = out_h(x.h), wo = out_w(x.w);
        const Eigen::Index kdim = static_cast<Eigen::Index>(in_c_) * k_ * k_;
        const Eigen::Index l = static_cast<Eigen::Index>(ho) * wo;

        Tensor4<S> y(x.n, out_c_, ho, wo);
        cols_.resize(static_cast<std::size_t>(x.n) * kdim * l);

        // weight stored row-major (out_c, K): materialize col-major once per call
        MatX<S> wm(out_c_, kdim);
        for (int oc = 0; oc < out_c_; ++oc)
            for (Eigen::Index kk = 0; kk < kdim; ++kk) wm(oc, kk) = weight.value[static_cast<std::size_t>(oc) * kdim + kk];

        for (int ni = 0; ni < x.n; ++ni) {
            S* col = cols_.data() + static_cast<std::size_t>(ni) * kdim * l;
            im2col(x, ni, col, ho, wo);
            ConstRowMajorMap<S> colm(col, kdim, l); // im2col writes row r contiguously
            auto ym = y.sample_matrix(ni);
            ym.noalias() = wm * colm;
            for (int oc = 0; oc < out_c_; ++oc) {
                S* row = y.sample(ni) + static_cast<std::size_t>(oc) * l;
                const S b = bias.value[oc];
                for (Eigen::Index i = 0; i < l; ++i) row[i] += b;
            }
        }
        return y;
    }

    Tensor4<S> backward(const Tensor4<S>& dy) {
        const int n = in_shape_[0], h = in_shape_[2], w = in_shape_[3];
        const int ho = dy.h, wo = dy.w;
        const Eigen::Index kdim = static_cast<Eigen::Index>(in_c_) * k_ * k_;
        const Eigen::Index l = static_cast<Eigen::Index>(ho) * wo;

        MatX<S> dwm = MatX<S>::Zero(out_c_, kdim);
        VecX<S> db = VecX<S>::Zero(out_c_);
        MatX<S> wm(out_c_, kdim);
        for (int oc = 0; oc < out_c_; ++oc)
            for (Eigen::Index kk = 0; kk < kdim; ++kk) wm(oc, kk) = weight.value[static_cast<std::size_t>(oc) * kdim + kk];

        Tensor4<S> dx(n, in_c_, h, w);
        Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dcol(kdim, l);
        for (int ni = 0; ni < n; ++ni) {
            const S* col = cols_.data() + static_cast<std::size_t>(ni) * kdim * l;
            ConstRowMajorMap<S> colm(col, kdim, l);
            auto dym = dy.sample_matrix(ni);
            dwm.noalias() += dym * colm.transpose();
            // scalar accumulation: vectorized reductions over raw-memory maps
            // round differently depending on buffer alignment
            for (int oc = 0; oc < out_c_; ++oc) {
                const S* row = dy.sample(ni) + static_cast<std::size_t>(oc) * l;
                S acc = S(0);
                for (Eigen::Index i = 0; i < l; ++i) acc += row[i];
                db(oc) += acc;
            }
            dcol.noalias() = wm.transpose() * dym;
            col2im(dcol, dx, ni, ho, wo);
        }
        for (int oc = 0; oc < out_c_; ++oc) {
            bias.grad[oc] += db(oc);
            for (Eigen::Index kk = 0; kk < kdim; ++kk)
                weight.grad[static_cast<std::size_t>(oc) * kdim + kk] += dwm(oc, kk);
        }
        return dx;
    }

    void release_cache() { cols_.clear(); cols_.shrink_to_fit(); }

    Param<S> weight;
    Param<S> bias;

private:
    void im2col(const Tensor4<S>& x, int ni, S* col, int ho, int wo) const {
        const Eigen::Index l = static_cast<Eigen::Index>(ho) * wo;
        const S* xs = x.sample(ni);
        const std::size_t plane = x.plane_size();
        Eigen::Index r = 0;
        for (int ci = 0; ci < in_c_; ++ci) {
            const S* xplane = xs + ci * plane;
            for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx, ++r) {
                    S* dst = col + r * l;
                    Eigen::Index idx = 0;
                    for (int y = 0; y < ho; ++y) {
                        const int sy = y * stride_ + ky - pad_;
                        if (sy < 0 || sy >= x.h) {
                            for (int xo = 0; xo < wo; ++xo, ++idx) dst[idx] = S(0);
                            continue;
                        }
                        const S* src_row = xplane + static_cast<std::size_t>(sy) * x.w;
                        for (int xo = 0; xo < wo; ++xo, ++idx) {
                            const int sx = xo * stride_ + kx - pad_;
                            dst[idx] = (sx >= 0 && sx < x.w) ? src_row[sx] : S(0);
                        }
                    }
                }
        }
    }

    void col2im(const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& dcol,
                Tensor4<S>& dx, int ni, int ho, int wo) const {
        S* xs = dx.sample(ni);
        const std::size_t plane = dx.plane_size();
        Eigen::Index r = 0;
        for (int ci = 0; ci < in_c_; ++ci) {
            S* xplane = xs + ci * plane;
            for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx, ++r) {
                    Eigen::Index idx = 0;
                    for (int y = 0; y < ho; ++y) {
                        const int sy = y * stride_ + ky - pad_;
                        if (sy < 0 || sy >= dx.h) {
                            idx += wo;
                            continue;
                        }
                        S* dst_row = xplane + static_cast<std::size_t>(sy) * dx.w;
                        for (int xo = 0; xo < wo; ++xo, ++idx) {
                            const int sx = xo * stride_ + kx - pad_;
                            if (sx >= 0 && sx < dx.w) dst_row[sx] += dcol(r, idx);
                        }
                    }
                }
        }
    }

    int in_c_ = 0, out_c_ = 0, k_ = 3, stride_ = 1, pad_ = 1;
    std::array<int, 4> in_shape_{};
    std::vector<S> cols_;
};

template <typename S>
class BatchNorm2d {
public:
    void configure(std::string name, int channels, double momentum = 0.1, double eps = 1e-5) {
        c_ = channels;
        momentum_ = momentum;
        eps_ = eps;
        gamma.init_shape(name + ".gamma", {channels});
        beta.init_shape(name + ".beta", {channels});
        std::fill(gamma.value.begin(), gamma.value.end(), S(1));
        running_mean.name = name + ".running_mean";
        running_mean.value.assign(channels, S(0));
        running_var.name = name + ".running_var";
        running_var.value.assign(channels, S(1));
    }

    Tensor4<S> forward(const Tensor4<S>& x, bool train) {
        if (x.c != c_) fail("shape", gamma.name + ": channel mismatch");
        const std::size_t plane = x.plane_size();
        const double count = static_cast<double>(x.n) * plane;
        Tensor4<S> y(x.n, x.c, x.h, x.w);

        mean_.assign(c_, S(0));
        invstd_.assign(c_, S(0));
        if (train) {
            for (int ci = 0; ci < c_; ++ci) {
                double m = 0.0;
                for (int ni = 0; ni < x.n; ++ni) {
                    const S* p = x.sample(ni) + ci * plane;
                    for (std::size_t i = 0; i < plane; ++i) m += p[i];
                }
                m /= count;
                double var = 0.0;
                for (int ni = 0; ni < x.n; ++ni) {
                    const S* p = x.sample(ni) + ci * plane;
                    for (std::size_t i = 0; i < plane; ++i) {
                        const double d = p[i] - m;
                        var += d * d;
                    }
                }
                var /= count; // biased, used for normalization
                mean_[ci] = static_cast<S>(m);
                invstd_[ci] = static_cast<S>(1.0 / std::sqrt(var + eps_));
                const double unbiased = count > 1 ? var * count / (count - 1.0) : var;
                running_mean.value[ci] = static_cast<S>((1.0 - momentum_) * running_mean.value[ci] + momentum_ * m);
                running_var.value[ci] = static_cast<S>((1.0 - momentum_) * running_var.value[ci] + momentum_ * unbiased);
            }
        } else {
            for (int ci = 0; ci < c_; ++ci) {
                mean_[ci] = running_mean.value[ci];
                invstd_[ci] = static_cast<S>(1.0 / std::sqrt(static_cast<double>(running_var.value[ci]) + eps_));
            }
        }

        xhat_ = Tensor4<S>(x.n, x.c, x.h, x.w);
        for (int ni = 0; ni < x.n; ++ni)
            for (int ci = 0; ci < c_; ++ci) {
                const S* p = x.sample(ni) + ci * plane;
                S* xh = xhat_.sample(ni) + ci * plane;
                S* yo = y.sample(ni) + ci * plane;
                const S g = gamma.value[ci], bta = beta.value[ci], mu = mean_[ci], is = invstd_[ci];
                for (std::size_t i = 0; i < plane; ++i) {
                    xh[i] = (p[i] - mu) * is;
                    yo[i] = g * xh[i] + bta;
                }
            }
        train_mode_ = train;
        return y;
    }

    Tensor4<S> backward(const Tensor4<S>& dy) {
        const std::size_t plane = dy.plane_size();
        const double count = static_cast<double>(dy.n) * plane;
        Tensor4<S> dx(dy.n, dy.c, dy.h, dy.w);
        for (int ci = 0; ci < c_; ++ci) {
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (int ni = 0; ni < dy.n; ++ni) {
                const S* d = dy.sample(ni) + ci * plane;
                const S* xh = xhat_.sample(ni) + ci * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    sum_dy += d[i];
                    sum_dy_xhat += static_cast<double>(d[i]) * xh[i];
                }
            }
            gamma.grad[ci] += static_cast<S>(sum_dy_xhat);
            beta.grad[ci] += static_cast<S>(sum_dy);

            const double g_is = static_cast<double>(gamma.value[ci]) * invstd_[ci];
            const double mean_dy = sum_dy / count;
            const double mean_dy_xhat = sum_dy_xhat / count;
            for (int ni = 0; ni < dy.n; ++ni) {
                const S* d = dy.sample(ni) + ci * plane;
                const S* xh = xhat_.sample(ni) + ci * plane;
                S* o = dx.sample(ni) + ci * plane;
                if (train_mode_) {
                    for (std::size_t i = 0; i < plane; ++i)
                        o[i] = static_cast<S>(g_is * (d[i] - mean_dy - xh[i] * mean_dy_xhat));
                } else {
                    for (std::size_t i = 0; i < plane; ++i) o[i] = static_cast<S>(g_is * d[i]);
                }
            }
        }
        return dx;
    }

    Param<S> gamma, beta;
    Buffer<S> running_mean, running_var;

private:
    int c_ = 0;
    double momentum_ = 0.1, eps_ = 1e-5;
    bool train_mode_ = true;
    std::vector<S> mean_, invstd_;
    Tensor4<S> xhat_;
};

// In-place ReLU keeping the activation mask.
template <typename S>
class Relu {
public:
    Tensor4<S> forward(Tensor4<S> x) {
        mask_.resize(x.data.size());
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            const bool on = x.data[i] > S(0);
            mask_[i] = on;
            if (!on) x.data[i] = S(0);
        }
        return x;
    }
    Tensor4<S> backward(Tensor4<S> dy) const {
        for (std::size_t i = 0; i < dy.data.size(); ++i)
            if (!mask_[i]) dy.data[i] = S(0);
        return dy;
    }

private:
    std::vector<char> mask_;
};

template <typename S>
class Linear {
public:
    void configure(std::string name, int in_dim, int out_dim) {
        in_ = in_dim;
        out_ = out_dim;
        weight.init_shape(name + ".weight", {out_dim, in_dim});
        bias.init_shape(name + ".bias", {out_dim});
    }

    void init(Rng& rng) { he_normal_fill(weight.value, in_, rng); }

    int in_dim() const { return in_; }
    int out_dim() const { return out_; }

    // x: (N, in) row-major
    MatX<S> forward(const MatX<S>& x) {
        if (x.cols() != in_)
            fail("shape", weight.name + ": expected input width " + std::to_string(in_) + ", got " +
                              std::to_string(x.cols()));
        x_cache_ = x;
        ConstRowMajorMap<S> wm(weight.value.data(), out_, in_);
        MatX<S> y = x * wm.transpose();
        Eigen::Map<const VecX<S>> b(bias.value.data(), out_);
        y.rowwise() += b.transpose();
        return y;
    }

    MatX<S> backward(const MatX<S>& dy) {
        ConstRowMajorMap<S> wm(weight.value.data(), out_, in_);
        MatX<S> dw = dy.transpose() * x_cache_; // (out, in)
        for (int o = 0; o < out_; ++o)
            for (int i = 0; i < in_; ++i) weight.grad[static_cast<std::size_t>(o) * in_ + i] += dw(o, i);
        VecX<S> db = dy.colwise().sum();
        for (int o = 0; o < out_; ++o) bias.grad[o] += db(o);
        return dy * wm;
    }

    Param<S> weight, bias;

private:
    int in_ = 0, out_ = 0;
    MatX<S> x_cache_;
};

// N,C,H,W -> (N, C) means.
template <typename S>
class GlobalAvgPool {
public:
    MatX<S> forward(const Tensor4<S>& x) {
        n_ = x.n;
        c_ = x.c;
        h_ = x.h;
        w_ = x.w;
        const std::size_t plane = x.plane_size();
        MatX<S> y(x.n, x.c);
        for (int ni = 0; ni < x.n; ++ni)
            for (int ci = 0; ci < x.c; ++ci) {
                const S* p = x.sample(ni) + ci * plane;
                double acc = 0.0;
                for (std::size_t i = 0; i < plane; ++i) acc += p[i];
                y(ni, ci) = static_cast<S>(acc / static_cast<double>(plane));
            }
        return y;
    }
    Tensor4<S> backward(const MatX<S>& dy) const {
        Tensor4<S> dx(n_, c_, h_, w_);
        const std::size_t plane = dx.plane_size();
        const S scale = S(1) / static_cast<S>(plane);
        for (int ni = 0; ni < n_; ++ni)
            for (int ci = 0; ci < c_; ++ci) {
                S* p = dx.sample(ni) + ci * plane;
                const S g = dy(ni, ci) * scale;
                for (std::size_t i = 0; i < plane; ++i) p[i] = g;
            }
        return dx;
    }

private:
    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
};

// conv-bn-relu, conv-bn, identity or 1x1-projected skip, final relu.
template <typename S>
class BasicBlock {
public:
    void configure(const std::string& name, int in_c, int out_c, int stride) {
        conv1.configure(name + ".conv1", in_c, out_c, 3, stride);
        bn1.configure(name + ".bn1", out_c);
        conv2.configure(name + ".conv2", out_c, out_c, 3, 1);
        bn2.configure(name + ".bn2", out_c);
        has_proj_ = (stride != 1 || in_c != out_c);
        if (has_proj_) {
            proj.configure(name + ".proj", in_c, out_c, 1, stride);
            proj_bn.configure(name + ".proj_bn", out_c);
        }
    }

    void init(Rng& rng) {
        conv1.init(rng);
        conv2.init(rng);
        if (has_proj_) proj.init(rng);
    }

    Tensor4<S> forward(const Tensor4<S>& x, bool train) {
        Tensor4<S> main = relu1_.forward(bn1.forward(conv1.forward(x), train));
        main = bn2.forward(conv2.forward(main), train);
        Tensor4<S> skip = has_proj_ ? proj_bn.forward(proj.forward(x), train) : x;
        if (!main.same_shape(skip)) fail("shape", "residual branch shape mismatch " + main.shape_str());
        for (std::size_t i = 0; i < main.data.size(); ++i) main.data[i] += skip.data[i];
        return relu2_.forward(std::move(main));
    }

    Tensor4<S> backward(const Tensor4<S>& dy) {
        Tensor4<S> d = relu2_.backward(dy);
        Tensor4<S> dskip = has_proj_ ? proj.backward(proj_bn.backward(d)) : d;
        Tensor4<S> dmain = conv1.backward(bn1.backward(relu1_.backward(conv2.backward(bn2.backward(d)))));
        for (std::size_t i = 0; i < dmain.data.size(); ++i) dmain.data[i] += dskip.data[i];
        return dmain;
    }

    template <typename Fn>
    void visit_params(Fn&& fn) {
        fn(conv1.weight);
        fn(conv1.bias);
        fn(bn1.gamma);
        fn(bn1.beta);
        fn(conv2.weight);
        fn(conv2.bias);
        fn(bn2.gamma);
        fn(bn2.beta);
        if (has_proj_) {
            fn(proj.weight);
            fn(proj.bias);
            fn(proj_bn.gamma);
            fn(proj_bn.beta);
        }
    }
    template <typename Fn>
    void visit_buffers(Fn&& fn) {
        fn(bn1.running_mean);
        fn(bn1.running_var);
        fn(bn2.running_mean);
        fn(bn2.running_var);
        if (has_proj_) {
            fn(proj_bn.running_mean);
            fn(proj_bn.running_var);
        }
    }

    Conv2d<S> conv1, conv2, proj;
    BatchNorm2d<S> bn1, bn2, proj_bn;

private:
    bool has_proj_ = false;
    Relu<S> relu1_, relu2_;
};

} // namespace sslnl::nn
