#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sslnl/lnl/gmm.hpp"
#include "sslnl/lnl/primitives.hpp"
#include "sslnl/rng.hpp"

using namespace sslnl;
using namespace sslnl::lnl;

namespace {

// naive reference EM, kept deliberately independent of the library code path
struct RefGmm {
    double mu0, mu1, var0, var1, pi0;
    std::vector<double> post0;
};

RefGmm reference_em(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double q) {
        const double pos = q * (n - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
        return sorted[lo] * (1.0 - (pos - lo)) + sorted[hi] * (pos - lo);
    };
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = std::max(var / n, 1e-6);

    RefGmm g{pct(0.10), pct(0.90), var, var, 0.5, std::vector<double>(n)};
    double prev = -1e308;
    for (int iter = 0; iter < 100; ++iter) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = g.pi0 * std::exp(-0.5 * (v[i] - g.mu0) * (v[i] - g.mu0) / g.var0) /
                             std::sqrt(2 * M_PI * g.var0);
            const double b = (1 - g.pi0) * std::exp(-0.5 * (v[i] - g.mu1) * (v[i] - g.mu1) / g.var1) /
                             std::sqrt(2 * M_PI * g.var1);
            g.post0[i] = a / (a + b);
            ll += std::log(a + b);
        }
        if (std::abs(ll - prev) < 1e-6) break;
        prev = ll;
        double n0 = 0.0;
        for (double r : g.post0) n0 += r;
        const double n1 = n - n0;
        if (n0 < 1e-12 || n1 < 1e-12) break;
        double m0 = 0, m1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            m0 += g.post0[i] * v[i];
            m1 += (1 - g.post0[i]) * v[i];
        }
        g.mu0 = m0 / n0;
        g.mu1 = m1 / n1;
        double v0 = 0, v1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            v0 += g.post0[i] * (v[i] - g.mu0) * (v[i] - g.mu0);
            v1 += (1 - g.post0[i]) * (v[i] - g.mu1) * (v[i] - g.mu1);
        }
        g.var0 = std::max(v0 / n0, 1e-6);
        g.var1 = std::max(v1 / n1, 1e-6);
        g.pi0 = n0 / n;
    }
    return g;
}

} // namespace

TEST_CASE("forget rate schedule") {
    CoteachingConfig cfg;
    cfg.warmup_epochs = 10;
    cfg.forget_rate_tau = 0.5;
    cfg.exponent = 1.0;
    CHECK(forget_rate(0, cfg) == doctest::Approx(1.0));
    CHECK(forget_rate(5, cfg) == doctest::Approx(0.75));
    CHECK(forget_rate(10, cfg) == doctest::Approx(0.5));
    CHECK(forget_rate(25, cfg) == doctest::Approx(0.5));

    // monotone non-increasing, bounded in [1 - tau, 1]
    double prev = 2.0;
    for (int t = 0; t <= 50; ++t) {
        const double r = forget_rate(t, cfg);
        CHECK(r <= prev + 1e-15);
        CHECK(r >= 1.0 - cfg.forget_rate_tau - 1e-15);
        CHECK(r <= 1.0 + 1e-15);
        prev = r;
    }
}

TEST_CASE("small-loss selection matches the sort oracle") {
    CHECK(small_loss_select({0.1, 5.0, 0.2, 4.0}, 0.5) == std::vector<std::size_t>{0, 2});
    CHECK(small_loss_select({1.0, 1.0, 1.0, 1.0}, 0.5) == std::vector<std::size_t>{0, 1});
    const std::vector<double> v = {3, 1, 2};
    CHECK(small_loss_select(v, 1.0) == std::vector<std::size_t>{0, 1, 2});

    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + rng.uniform_int(50);
        std::vector<double> losses(n);
        for (double& x : losses) x = rng.uniform_int(8); // ties on purpose
        const double keep = rng.uniform(0.01, 1.0);
        const auto got = small_loss_select(losses, keep);

        // oracle: stable sort by loss, take ceil(keep*n)
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
        order.resize(static_cast<std::size_t>(std::ceil(keep * n)));
        std::sort(order.begin(), order.end());
        CHECK(got == order);
    }
    CHECK_THROWS_AS(small_loss_select({}, 0.5), Error);
}

TEST_CASE("sharpen examples and properties") {
    const std::vector<double> id = sharpen({0.3, 0.7}, 1.0);
    CHECK(id[0] == doctest::Approx(0.3));
    CHECK(id[1] == doctest::Approx(0.7));

    const std::vector<double> sym = sharpen({0.5, 0.5}, 0.17);
    CHECK(sym[0] == doctest::Approx(0.5));

    const std::vector<double> s = sharpen({0.8, 0.2}, 0.5);
    CHECK(s[0] == doctest::Approx(0.64 / 0.68).epsilon(1e-9));
    CHECK(s[1] == doctest::Approx(0.04 / 0.68).epsilon(1e-9));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> d(4);
        double total = 0.0;
        for (double& x : d) {
            x = rng.uniform();
            total += x;
        }
        for (double& x : d) x /= total;
        const auto out = sharpen(d, 0.2);
        double sum = 0.0;
        for (double x : out) sum += x;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::distance(out.begin(), std::max_element(out.begin(), out.end())) ==
              std::distance(d.begin(), std::max_element(d.begin(), d.end())));

        // p^(1/T) limits: T=1 is the identity, T<1 grows the max entry,
        // T->inf flattens toward uniform
        const auto ident = sharpen(d, 1.0);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(ident[i] == doctest::Approx(d[i]).epsilon(1e-12));

        const double dmax = *std::max_element(d.begin(), d.end());
        CHECK(*std::max_element(out.begin(), out.end()) >= dmax - 1e-12);
        const auto hard = sharpen(d, 0.05);
        CHECK(*std::max_element(hard.begin(), hard.end()) >=
              *std::max_element(out.begin(), out.end()) - 1e-12);

        const auto flat = sharpen(d, 100.0);
        const double uniform = 1.0 / static_cast<double>(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(std::abs(flat[i] - uniform) <= std::abs(d[i] - uniform) + 1e-12);
    }
    CHECK_THROWS_AS(sharpen({0.0, 0.0}, 0.5), Error);
    CHECK_THROWS_AS(sharpen({0.5, 0.5}, 0.0), Error);
}

TEST_CASE("mixup lambda always favors the first argument") {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        const double lp = draw_mixup_lambda(4.0, rng);
        CHECK(lp >= 0.5);
        CHECK(lp <= 1.0);
    }

    MixupResult r = mixup({1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}, 4.0, rng);
    CHECK(r.x_mix[0] == doctest::Approx(r.lambda_prime));
    CHECK(r.p_mix[0] + r.p_mix[1] == doctest::Approx(1.0));
    CHECK(r.p_mix[0] >= 0.5);

    CHECK_THROWS_AS(mixup({1.0}, {1.0}, {1.0, 2.0}, {1.0}, 4.0, rng), Error);
}

TEST_CASE("co-refinement endpoints and hand example") {
    const std::vector<double> onehot = {1.0, 0.0};
    const std::vector<double> pred = {0.2, 0.8};

    const auto w1 = co_refine(onehot, 1.0, pred, 0.2);
    CHECK(w1[0] == doctest::Approx(1.0));
    CHECK(w1[1] == doctest::Approx(0.0));

    const auto w0 = co_refine(onehot, 0.0, pred, 1.0);
    CHECK(w0[0] == doctest::Approx(0.2));
    CHECK(w0[1] == doctest::Approx(0.8));

    const auto mid = co_refine(onehot, 0.5, pred, 1.0);
    CHECK(mid[0] == doctest::Approx(0.6));
    CHECK(mid[1] == doctest::Approx(0.4));
}

TEST_CASE("co-guessing averages all predictions then sharpens") {
    const std::vector<std::vector<double>> same = {{0.0, 1.0}, {0.0, 1.0}};
    const auto fixed = co_guess(same, same, 0.2);
    CHECK(fixed[0] == doctest::Approx(0.0));
    CHECK(fixed[1] == doctest::Approx(1.0));

    const std::vector<std::vector<double>> a = {{1.0, 0.0}, {0.0, 1.0}};
    const auto sym = co_guess(a, a, 1.0);
    CHECK(sym[0] == doctest::Approx(0.5));

    // permutation invariance across the 2M inputs
    const std::vector<std::vector<double>> pa = {{0.9, 0.1}, {0.3, 0.7}};
    const std::vector<std::vector<double>> pb = {{0.5, 0.5}, {0.6, 0.4}};
    const std::vector<std::vector<double>> pa2 = {{0.6, 0.4}, {0.9, 0.1}};
    const std::vector<std::vector<double>> pb2 = {{0.3, 0.7}, {0.5, 0.5}};
    const auto g1 = co_guess(pa, pb, 0.4);
    const auto g2 = co_guess(pa2, pb2, 0.4);
    CHECK(g1[0] == doctest::Approx(g2[0]).epsilon(1e-12));
}

TEST_CASE("gmm separates two well-separated clusters like the reference EM") {
    Rng rng(31);
    std::vector<double> values;
    for (int i = 0; i < 500; ++i) values.push_back(rng.normal(0.1, 0.01));
    for (int i = 0; i < 500; ++i) values.push_back(rng.normal(0.9, 0.01));

    GmmFit fit = fit_gmm_1d(values, 1);
    CHECK(std::abs(fit.means[0] - 0.1) < 0.01);
    CHECK(std::abs(fit.means[1] - 0.9) < 0.01);
    for (int i = 0; i < 500; ++i) CHECK(fit.posterior_low[i] > 0.99);
    for (int i = 500; i < 1000; ++i) CHECK(fit.posterior_low[i] < 0.01);

    const RefGmm ref = reference_em(values);
    CHECK(std::abs(fit.means[0] - std::min(ref.mu0, ref.mu1)) < 0.01);
    CHECK(std::abs(fit.means[1] - std::max(ref.mu0, ref.mu1)) < 0.01);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double ref_low = (ref.mu0 <= ref.mu1) ? ref.post0[i] : 1.0 - ref.post0[i];
        CHECK(std::abs(fit.posterior_low[i] - ref_low) < 0.01);
    }
}

TEST_CASE("gmm on an exactly symmetric input recovers equal weights") {
    std::vector<double> values;
    for (int i = 0; i < 50; ++i) values.push_back(0.1);
    for (int i = 0; i < 50; ++i) values.push_back(0.9);
    GmmFit fit = fit_gmm_1d(values, 3);
    CHECK(std::abs(fit.weights[0] - 0.5) < 0.01);
    CHECK(std::abs(fit.weights[1] - 0.5) < 0.01);
}

TEST_CASE("gmm handles the minimal two-point case") {
    GmmFit fit = fit_gmm_1d({0.0, 1.0}, 7);
    CHECK(std::abs(fit.means[0] - 0.0) < 0.05);
    CHECK(std::abs(fit.means[1] - 1.0) < 0.05);
    CHECK(fit.posterior_low[0] > 0.5);
}

TEST_CASE("gmm log-likelihood never decreases across iterations") {
    Rng rng(55);
    std::vector<double> values;
    for (int i = 0; i < 300; ++i) values.push_back(rng.normal(0.3, 0.05));
    for (int i = 0; i < 200; ++i) values.push_back(rng.normal(0.7, 0.08));
    GmmFit fit = fit_gmm_1d(values, 9);
    for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i)
        CHECK(fit.log_likelihood_trace[i] >= fit.log_likelihood_trace[i - 1] - 1e-9);
}

TEST_CASE("gmm rejects degenerate inputs with the declared category") {
    try {
        fit_gmm_1d({0.5, 0.5, 0.5, 0.5}, 1);
        FAIL("expected degenerate-losses");
    } catch (const Error& e) {
        CHECK(e.category() == "degenerate-losses");
    }
    CHECK_THROWS_AS(fit_gmm_1d({1.0}, 1), Error);
}

TEST_CASE("min-max normalization maps to the unit interval") {
    const auto out = min_max_normalize({2.0, 4.0, 6.0});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(1.0));
    const auto flat = min_max_normalize({3.0, 3.0});
    CHECK(flat[0] == 0.0);
}
