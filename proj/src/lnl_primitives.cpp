#include "sslnl/lnl/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sslnl/common.hpp"

namespace sslnl::lnl {

double forget_rate(int epoch, const CoteachingConfig& cfg) {
    check(epoch >= 0, "config", "forget_rate epoch must be >= 0");
    check(cfg.warmup_epochs >= 1, "config", "forget-rate ramp length must be >= 1");
    check(cfg.forget_rate_tau >= 0.0 && cfg.forget_rate_tau <= 1.0, "config", "tau_f must be in [0,1]");
    const double ramp = std::min(std::pow(static_cast<double>(epoch) / cfg.warmup_epochs, cfg.exponent), 1.0);
    return 1.0 - cfg.forget_rate_tau * ramp;
}

std::vector<std::size_t> small_loss_select(const std::vector<double>& losses, double keep_fraction) {
    check(!losses.empty(), "config", "small_loss_select on empty losses");
    check(keep_fraction > 0.0 && keep_fraction <= 1.0, "config", "keep_fraction must be in (0,1]");
    const std::size_t n = losses.size();
    const std::size_t keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
    order.resize(std::min(keep, n));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<double> sharpen(const std::vector<double>& dist, double temperature) {
    check(temperature > 0.0, "config", "sharpening temperature must be positive");
    check(!dist.empty(), "config", "sharpen on empty distribution");
    double total = 0.0;
    std::vector<double> out(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        check(dist[i] >= 0.0, "config", "sharpen needs nonnegative entries");
        out[i] = std::pow(dist[i], 1.0 / temperature);
        total += out[i];
    }
    check(total > 0.0, "config", "sharpen on an all-zero distribution");
    for (double& v : out) v /= total;
    return out;
}

double draw_mixup_lambda(double alpha, Rng& rng) {
    check(alpha > 0.0, "config", "mixup alpha must be positive");
    const double lam = rng.beta(alpha, alpha);
    return std::max(lam, 1.0 - lam);
}

MixupResult mixup(const std::vector<double>& x1, const std::vector<double>& p1,
                  const std::vector<double>& x2, const std::vector<double>& p2, double alpha, Rng& rng) {
    check(x1.size() == x2.size(), "shape", "mixup input shape mismatch");
    check(p1.size() == p2.size(), "shape", "mixup label shape mismatch");
    MixupResult out;
    out.lambda_prime = draw_mixup_lambda(alpha, rng);
    out.x_mix.resize(x1.size());
    out.p_mix.resize(p1.size());
    for (std::size_t i = 0; i < x1.size(); ++i)
        out.x_mix[i] = out.lambda_prime * x1[i] + (1.0 - out.lambda_prime) * x2[i];
    for (std::size_t i = 0; i < p1.size(); ++i)
        out.p_mix[i] = out.lambda_prime * p1[i] + (1.0 - out.lambda_prime) * p2[i];
    return out;
}

std::vector<double> co_refine(const std::vector<double>& observed_onehot, double w,
                              const std::vector<double>& mean_prediction, double temperature) {
    check(observed_onehot.size() == mean_prediction.size(), "shape", "co_refine shape mismatch");
    check(w >= 0.0 && w <= 1.0, "config", "clean posterior w must be in [0,1]");
    std::vector<double> blended(observed_onehot.size());
    for (std::size_t i = 0; i < blended.size(); ++i)
        blended[i] = w * observed_onehot[i] + (1.0 - w) * mean_prediction[i];
    return sharpen(blended, temperature);
}

std::vector<double> co_guess(const std::vector<std::vector<double>>& predictions_net_a,
                             const std::vector<std::vector<double>>& predictions_net_b, double temperature) {
    check(!predictions_net_a.empty() && !predictions_net_b.empty(), "config", "co_guess needs predictions");
    const std::size_t k = predictions_net_a[0].size();
    std::vector<double> avg(k, 0.0);
    std::size_t count = 0;
    for (const auto* side : {&predictions_net_a, &predictions_net_b}) {
        for (const auto& p : *side) {
            check(p.size() == k, "shape", "co_guess distribution width mismatch");
            for (std::size_t i = 0; i < k; ++i) avg[i] += p[i];
            ++count;
        }
    }
    for (double& v : avg) v /= static_cast<double>(count);
    return sharpen(avg, temperature);
}

} // namespace sslnl::lnl
