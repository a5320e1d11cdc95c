#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sslnl::lnl {

// Two-component 1-D Gaussian mixture fitted by EM. Component 0 is the
// lower-mean ("clean") component; posterior_low holds w_i = P(component 0 | x_i).
struct GmmFit {
    std::array<double, 2> means{{0.0, 0.0}};
    std::array<double, 2> variances{{0.0, 0.0}};
    std::array<double, 2> weights{{0.0, 0.0}};
    std::vector<double> posterior_low;
    int iterations = 0;
    double final_log_likelihood = 0.0;
    std::vector<double> log_likelihood_trace;
};

// EM with percentile init (means at p10/p90, shared sample variance, equal
// weights), variance floor 1e-6, stop at |dLL| < 1e-6 or 100 iterations.
// All-identical values raise the "degenerate-losses" error category; callers
// treat that epoch's samples as all clean. The seed only breaks init ties.
GmmFit fit_gmm_1d(const std::vector<double>& values, std::uint64_t seed = 0);

// Per-epoch loss preprocessing before the GMM: min-max to [0,1].
std::vector<double> min_max_normalize(const std::vector<double>& values);

} // namespace sslnl::lnl
