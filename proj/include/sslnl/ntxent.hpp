#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sslnl/common.hpp"
#include "sslnl/nn/tensor.hpp"

namespace sslnl {

using nn::MatX;
using nn::VecX;

template <typename S>
struct NtXentResult {
    S loss;
    MatX<S> grad; // d loss / d embeddings (pre-normalization inputs)
};

// Normalized-temperature cross-entropy over a batch arranged as
// [a_1..a_N, b_1..b_N]: anchor i's positive is row (i+N) mod 2N, the
// denominator runs over the other 2N-1 rows. Rows are L2-normalized
// internally; the mean over all 2N anchors is returned.
template <typename S>
NtXentResult<S> nt_xent_loss_grad(const MatX<S>& embeddings, S temperature) {
    const Eigen::Index rows = embeddings.rows();
    check(temperature > S(0), "config", "nt_xent temperature must be positive");
    check(rows >= 4 && rows % 2 == 0, "config", "nt_xent needs 2N embeddings with N >= 2");

    const Eigen::Index n2 = rows;
    const Eigen::Index n = n2 / 2;

    VecX<S> norms(n2);
    MatX<S> z(n2, embeddings.cols());
    for (Eigen::Index i = 0; i < n2; ++i) {
        S nrm = embeddings.row(i).norm();
        check(nrm > S(0), "config", "nt_xent got a zero embedding row");
        norms(i) = nrm;
        z.row(i) = embeddings.row(i) / nrm;
    }

    MatX<S> sim = (z * z.transpose()) / temperature;

    // row-wise log-sum-exp over k != i
    S loss = S(0);
    MatX<S> gs = MatX<S>::Zero(n2, n2); // d loss / d sim
    const S inv_count = S(1) / static_cast<S>(n2);
    for (Eigen::Index i = 0; i < n2; ++i) {
        const Eigen::Index pos = (i + n) % n2;
        S mx = -std::numeric_limits<S>::infinity();
        for (Eigen::Index k = 0; k < n2; ++k)
            if (k != i) mx = std::max(mx, sim(i, k));
        S denom = S(0);
        for (Eigen::Index k = 0; k < n2; ++k)
            if (k != i) denom += std::exp(sim(i, k) - mx);
        loss += inv_count * (-(sim(i, pos) - mx) + std::log(denom));
        for (Eigen::Index k = 0; k < n2; ++k) {
            if (k == i) continue;
            gs(i, k) = inv_count * std::exp(sim(i, k) - mx) / denom;
        }
        gs(i, pos) -= inv_count;
    }

    // through sim(i,k) = z_i . z_k / tau, both arguments
    MatX<S> gz = (gs + gs.transpose()) * z / temperature;

    NtXentResult<S> out;
    out.loss = loss;
    out.grad.resize(n2, embeddings.cols());
    for (Eigen::Index i = 0; i < n2; ++i) {
        const S zdot = z.row(i).dot(gz.row(i));
        out.grad.row(i) = (gz.row(i) - zdot * z.row(i)) / norms(i);
    }
    return out;
}

template <typename S>
S nt_xent_loss(const MatX<S>& embeddings, S temperature) {
    return nt_xent_loss_grad(embeddings, temperature).loss;
}

} // namespace sslnl
