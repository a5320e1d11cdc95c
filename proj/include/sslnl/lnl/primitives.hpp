#pragma once

#include <cstddef>
#include <vector>

#include "sslnl/rng.hpp"

namespace sslnl::lnl {

struct CoteachingConfig {
    int warmup_epochs = 10;     // T_k, the forget-rate ramp length
    double forget_rate_tau = 0; // tau_f, set to the noise rate p
    double exponent = 1.0;      // c
};

// Keep-fraction schedule R(T) = 1 - tau_f * min((T/T_k)^c, 1).
// Monotone non-increasing, R(0) = 1, saturates at 1 - tau_f for T >= T_k.
double forget_rate(int epoch, const CoteachingConfig& cfg);

// Indices of the ceil(R*n) smallest losses, ties broken by lower index.
std::vector<std::size_t> small_loss_select(const std::vector<double>& losses, double keep_fraction);

// Entry-wise power 1/T, renormalized.
std::vector<double> sharpen(const std::vector<double>& dist, double temperature);

// lambda ~ Beta(alpha, alpha), returned as lambda' = max(lambda, 1-lambda)
// so the first mix argument always dominates.
double draw_mixup_lambda(double alpha, Rng& rng);

struct MixupResult {
    std::vector<double> x_mix;
    std::vector<double> p_mix;
    double lambda_prime = 1.0;
};

// Convex combination of two (input, label-distribution) pairs with a freshly
// drawn lambda'.
MixupResult mixup(const std::vector<double>& x1, const std::vector<double>& p1,
                  const std::vector<double>& x2, const std::vector<double>& p2, double alpha, Rng& rng);

// w*y + (1-w)*p_mean, then sharpen.
std::vector<double> co_refine(const std::vector<double>& observed_onehot, double w,
                              const std::vector<double>& mean_prediction, double temperature);

// Average all 2M distributions from the two networks, then sharpen.
std::vector<double> co_guess(const std::vector<std::vector<double>>& predictions_net_a,
                             const std::vector<std::vector<double>>& predictions_net_b, double temperature);

} // namespace sslnl::lnl
