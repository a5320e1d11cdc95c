#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sslnl/nn/tensor.hpp"

namespace sslnl::nn {

template <typename S>
MatX<S> softmax_rows(const MatX<S>& logits) {
    MatX<S> p(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const S mx = logits.row(i).maxCoeff();
        S denom = S(0);
        for (Eigen::Index j = 0; j < logits.cols(); ++j) {
            p(i, j) = std::exp(logits(i, j) - mx);
            denom += p(i, j);
        }
        p.row(i) /= denom;
    }
    return p;
}

template <typename S>
struct CeResult {
    S mean_loss = S(0);
    VecX<S> per_sample;
    MatX<S> dlogits; // already scaled by the per-sample weights
};

// Cross-entropy against integer labels. `weights` scales each sample's
// contribution to the gradient and mean (defaults to 1/N each). Per-sample
// losses are returned unweighted for selection rules.
template <typename S>
CeResult<S> cross_entropy(const MatX<S>& logits, const std::vector<int>& labels,
                          const std::vector<S>* weights = nullptr) {
    const Eigen::Index n = logits.rows();
    check(n > 0, "shape", "cross_entropy on empty batch");
    check(static_cast<Eigen::Index>(labels.size()) == n, "shape", "labels/logits row mismatch");

    CeResult<S> out;
    out.per_sample.resize(n);
    MatX<S> p = softmax_rows(logits);
    out.dlogits = p;
    const S default_w = S(1) / static_cast<S>(n);
    const Eigen::Index cols = logits.cols();
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || y >= cols) fail("shape", "label out of range");
        out.per_sample(i) = -std::log(std::max(p(i, y), std::numeric_limits<S>::min()));
        const S w = weights ? (*weights)[i] : default_w;
        out.dlogits(i, y) -= S(1);
        for (Eigen::Index j = 0; j < cols; ++j) out.dlogits(i, j) *= w;
        out.mean_loss += w * out.per_sample(i);
    }
    return out;
}

// Cross-entropy against soft target rows (mixup / co-refined labels).
template <typename S>
CeResult<S> soft_cross_entropy(const MatX<S>& logits, const MatX<S>& targets) {
    const Eigen::Index n = logits.rows();
    check(targets.rows() == n && targets.cols() == logits.cols(), "shape", "target shape mismatch");
    CeResult<S> out;
    out.per_sample.resize(n);
    MatX<S> p = softmax_rows(logits);
    const S w = S(1) / static_cast<S>(n);
    out.dlogits = (p - targets) * w;
    for (Eigen::Index i = 0; i < n; ++i) {
        S loss = S(0);
        for (Eigen::Index j = 0; j < logits.cols(); ++j)
            loss -= targets(i, j) * std::log(std::max(p(i, j), std::numeric_limits<S>::min()));
        out.per_sample(i) = loss;
        out.mean_loss += w * loss;
    }
    return out;
}

// Mean squared error between softmax(logits) and target rows (the DivideMix
// unlabeled term). Loss averages over samples, sums over classes.
template <typename S>
CeResult<S> mse_prob(const MatX<S>& logits, const MatX<S>& targets) {
    const Eigen::Index n = logits.rows();
    check(targets.rows() == n && targets.cols() == logits.cols(), "shape", "target shape mismatch");
    CeResult<S> out;
    out.per_sample.resize(n);
    MatX<S> p = softmax_rows(logits);
    MatX<S> diff = p - targets;
    const S w = S(1) / static_cast<S>(n);
    out.dlogits.resize(n, logits.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        out.per_sample(i) = diff.row(i).squaredNorm();
        out.mean_loss += w * out.per_sample(i);
        // d/dlogits of ||p - t||^2 with p = softmax: 2 * (diag(p) - p p^T) (p - t)
        const S dot = diff.row(i).dot(p.row(i));
        for (Eigen::Index j = 0; j < logits.cols(); ++j)
            out.dlogits(i, j) = w * S(2) * p(i, j) * (diff(i, j) - dot);
    }
    return out;
}

template <typename S>
std::vector<int> argmax_rows(const MatX<S>& logits) {
    std::vector<int> out(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index best = 0;
        logits.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

} // namespace sslnl::nn
