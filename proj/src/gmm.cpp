#include "sslnl/lnl/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sslnl/common.hpp"
#include "sslnl/rng.hpp"

namespace sslnl::lnl {

namespace {

constexpr double kVarianceFloor = 1e-6;
constexpr double kLogLikTol = 1e-6;
constexpr int kMaxIterations = 100;

double percentile(std::vector<double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline double log_gauss(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

} // namespace

std::vector<double> min_max_normalize(const std::vector<double>& values) {
    check(!values.empty(), "config", "min_max_normalize on empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(values.size());
    if (hi - lo < 1e-12) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

GmmFit fit_gmm_1d(const std::vector<double>& values, std::uint64_t seed) {
    const std::size_t n = values.size();
    check(n >= 2, "config", "fit_gmm_1d needs at least 2 values");

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) fail("degenerate-losses", "all loss values identical; cannot separate");

    double mu0 = percentile(sorted, 0.10);
    double mu1 = percentile(sorted, 0.90);
    if (mu1 - mu0 < 1e-12) {
        // heavy central ties: spread to the extremes; seeded jitter as a last resort
        mu0 = sorted.front();
        mu1 = sorted.back();
        if (mu1 - mu0 < 1e-12) {
            Rng rng(derive_seed(seed, "gmm-init"));
            mu0 -= 1e-6 * (1.0 + rng.uniform());
            mu1 += 1e-6 * (1.0 + rng.uniform());
        }
    }

    double sample_mean = 0.0;
    for (double v : values) sample_mean += v;
    sample_mean /= static_cast<double>(n);
    double sample_var = 0.0;
    for (double v : values) sample_var += (v - sample_mean) * (v - sample_mean);
    sample_var = std::max(sample_var / static_cast<double>(n), kVarianceFloor);

    std::array<double, 2> mu = {mu0, mu1};
    std::array<double, 2> var = {sample_var, sample_var};
    std::array<double, 2> pi = {0.5, 0.5};

    GmmFit fit;
    std::vector<double> resp0(n);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // E step + log-likelihood
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double l0 = std::log(pi[0]) + log_gauss(values[i], mu[0], var[0]);
            const double l1 = std::log(pi[1]) + log_gauss(values[i], mu[1], var[1]);
            const double mx = std::max(l0, l1);
            const double lse = mx + std::log(std::exp(l0 - mx) + std::exp(l1 - mx));
            resp0[i] = std::exp(l0 - lse);
            ll += lse;
        }
        fit.log_likelihood_trace.push_back(ll);
        fit.iterations = iter + 1;
        if (std::abs(ll - prev_ll) < kLogLikTol) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;

        // M step
        double n0 = 0.0;
        for (double r : resp0) n0 += r;
        const double n1 = static_cast<double>(n) - n0;
        if (n0 < 1e-12 || n1 < 1e-12) break; // one component vanished; keep last estimates

        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m0 += resp0[i] * values[i];
            m1 += (1.0 - resp0[i]) * values[i];
        }
        mu[0] = m0 / n0;
        mu[1] = m1 / n1;
        double v0 = 0.0, v1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d0 = values[i] - mu[0], d1 = values[i] - mu[1];
            v0 += resp0[i] * d0 * d0;
            v1 += (1.0 - resp0[i]) * d1 * d1;
        }
        var[0] = std::max(v0 / n0, kVarianceFloor);
        var[1] = std::max(v1 / n1, kVarianceFloor);
        pi[0] = n0 / static_cast<double>(n);
        pi[1] = 1.0 - pi[0];
    }

    fit.final_log_likelihood = prev_ll;
    const int low = (mu[0] <= mu[1]) ? 0 : 1;
    fit.means = {mu[low], mu[1 - low]};
    fit.variances = {var[low], var[1 - low]};
    fit.weights = {pi[low], pi[1 - low]};
    fit.posterior_low.resize(n);
    for (std::size_t i = 0; i < n; ++i) fit.posterior_low[i] = (low == 0) ? resp0[i] : 1.0 - resp0[i];
    return fit;
}

} // namespace sslnl::lnl
