// Acceptance gate: runs every primary criterion end to end and prints one
// PASS/FAIL line per criterion. Exit code is nonzero if any criterion fails.
//
// The training-based criteria share one synthetic dataset (4 classes, 500
// images per class, 32x32) and parallelize their independent trials over the
// available cores.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "sslnl/experiment.hpp"
#include "sslnl/nn/checkpoint.hpp"
#include "sslnl/nn/loss.hpp"
#include "sslnl/ntxent.hpp"

using namespace sslnl;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct CriterionResult {
    std::string label;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CriterionResult> g_results;

void report(const std::string& label, bool pass, const std::string& detail, double seconds) {
    g_results.push_back({label, pass, detail, seconds});
    std::printf("[%s] %s (%.1f s): %s\n", pass ? "PASS" : "FAIL", label.c_str(), seconds, detail.c_str());
    std::fflush(stdout);
}

void run_parallel(std::vector<std::function<void()>> jobs) {
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                             static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> guard(mu);
                    if (next >= jobs.size()) return;
                    mine = next++;
                }
                jobs[mine]();
            }
        });
    for (auto& t : pool) t.join();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_noise_statistics() {
    const auto t0 = Clock::now();
    const int k = 9, n = 100000;
    DatasetSplit split;
    split.num_classes = k;
    split.name = "train";
    for (int i = 0; i < n; ++i) {
        LabeledImage li;
        li.pixels = Image(1, 1, 1);
        li.clean_label = i % k;
        li.id = "s/" + std::to_string(i);
        CorruptionRecord rec;
        rec.id = li.id;
        rec.clean_label = rec.observed_label = li.clean_label;
        split.records.push_back(rec);
        split.images.push_back(std::move(li));
    }
    DatasetSplit noisy = inject_symmetric_noise(split, {0.5, k, 20250808});

    long kept = 0;
    std::map<std::pair<int, int>, long> flips;
    std::map<int, long> per_class;
    for (const auto& rec : noisy.records) {
        per_class[rec.clean_label]++;
        if (!rec.is_corrupted)
            ++kept;
        else
            flips[{rec.clean_label, rec.observed_label}]++;
    }
    const double retention = static_cast<double>(kept) / n;
    const auto tm = transition_matrix({0.5, k, 0});
    bool pass = std::abs(retention - 0.5) < 0.01 && std::abs(tm[0][0] - 0.5) < 1e-12 &&
                std::abs(tm[0][1] - 0.0625) < 1e-12;
    double worst = 0.0;
    for (int to = 0; to < k; ++to) {
        long received = 0, eligible = 0;
        for (int from = 0; from < k; ++from) {
            if (from == to) continue;
            received += flips[{from, to}];
            eligible += per_class[from];
        }
        worst = std::max(worst, std::abs(static_cast<double>(received) / eligible - 0.0625));
    }
    pass = pass && worst < 0.005;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    pass = pass && secs < 10.0;
    report("criterion 1: noise-model statistics", pass,
           "retention=" + fmt(retention) + " worst per-class flip dev=" + fmt(worst) + " (bounds 0.01/0.005, <10s)",
           secs);
}

// ---------------------------------------------------------------- criterion 2

// brute-force EM living in test code, independent of lnl::fit_gmm_1d
struct BruteGmm {
    double mu[2], var[2], pi[2];
    std::vector<double> post_low;
    std::vector<double> ll;
};

BruteGmm brute_force_em(const std::vector<double>& v) {
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
    double var0 = 0.0;
    for (double x : v) var0 += (x - mean) * (x - mean);
    var0 = std::max(var0 / n, 1e-6);

    BruteGmm g;
    g.mu[0] = pct(0.1);
    g.mu[1] = pct(0.9);
    g.var[0] = g.var[1] = var0;
    g.pi[0] = g.pi[1] = 0.5;
    std::vector<double> r0(n);
    double prev = -1e308;
    for (int iter = 0; iter < 100; ++iter) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a =
                g.pi[0] * std::exp(-0.5 * (v[i] - g.mu[0]) * (v[i] - g.mu[0]) / g.var[0]) / std::sqrt(2 * M_PI * g.var[0]);
            const double b =
                g.pi[1] * std::exp(-0.5 * (v[i] - g.mu[1]) * (v[i] - g.mu[1]) / g.var[1]) / std::sqrt(2 * M_PI * g.var[1]);
            r0[i] = a / (a + b);
            ll += std::log(a + b);
        }
        g.ll.push_back(ll);
        if (std::abs(ll - prev) < 1e-6) break;
        prev = ll;
        double n0 = std::accumulate(r0.begin(), r0.end(), 0.0);
        const double n1 = n - n0;
        if (n0 < 1e-12 || n1 < 1e-12) break;
        double m0 = 0, m1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            m0 += r0[i] * v[i];
            m1 += (1 - r0[i]) * v[i];
        }
        g.mu[0] = m0 / n0;
        g.mu[1] = m1 / n1;
        double s0 = 0, s1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s0 += r0[i] * (v[i] - g.mu[0]) * (v[i] - g.mu[0]);
            s1 += (1 - r0[i]) * (v[i] - g.mu[1]) * (v[i] - g.mu[1]);
        }
        g.var[0] = std::max(s0 / n0, 1e-6);
        g.var[1] = std::max(s1 / n1, 1e-6);
        g.pi[0] = n0 / n;
        g.pi[1] = 1 - g.pi[0];
    }
    g.post_low.resize(n);
    const bool low_first = g.mu[0] <= g.mu[1];
    for (std::size_t i = 0; i < n; ++i) g.post_low[i] = low_first ? r0[i] : 1.0 - r0[i];
    if (!low_first) {
        std::swap(g.mu[0], g.mu[1]);
        std::swap(g.var[0], g.var[1]);
        std::swap(g.pi[0], g.pi[1]);
    }
    return g;
}

void criterion_gmm_oracle() {
    const auto t0 = Clock::now();
    Rng rng(424242);
    bool pass = true;
    std::string why;
    for (int trial = 0; trial < 20 && pass; ++trial) {
        // two clusters with separation >= 5 sigma
        const double sd = rng.uniform(0.005, 0.04);
        const double mu_low = rng.uniform(0.05, 0.35);
        const double mu_high = mu_low + std::max(5.0 * sd, rng.uniform(0.3, 0.6));
        const int n_low = 150 + rng.uniform_int(350);
        const int n_high = 150 + rng.uniform_int(350);
        std::vector<double> v;
        for (int i = 0; i < n_low; ++i) v.push_back(rng.normal(mu_low, sd));
        for (int i = 0; i < n_high; ++i) v.push_back(rng.normal(mu_high, sd));

        lnl::GmmFit fit = lnl::fit_gmm_1d(v, trial);
        BruteGmm ref = brute_force_em(v);

        if (std::abs(fit.means[0] - ref.mu[0]) >= 0.01 || std::abs(fit.means[1] - ref.mu[1]) >= 0.01) {
            pass = false;
            why = "means differ from brute-force EM on set " + std::to_string(trial);
        }
        for (std::size_t i = 0; i < v.size() && pass; ++i)
            if (std::abs(fit.posterior_low[i] - ref.post_low[i]) >= 0.01) {
                pass = false;
                why = "posterior differs on set " + std::to_string(trial);
            }
        for (std::size_t i = 1; i < fit.log_likelihood_trace.size() && pass; ++i)
            if (fit.log_likelihood_trace[i] < fit.log_likelihood_trace[i - 1] - 1e-9) {
                pass = false;
                why = "log-likelihood decreased on set " + std::to_string(trial);
            }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    pass = pass && secs < 30.0;
    report("criterion 2: GMM oracle equivalence", pass,
           pass ? "20 two-cluster sets match brute-force EM within 0.01, LL monotone (<30s)" : why, secs);
}

// ---------------------------------------------------------------- criterion 3

void criterion_ntxent_gradient() {
    const auto t0 = Clock::now();
    Rng rng(31337);
    MatX<double> e(8, 8); // N=4 pairs, D=8
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) e(i, j) = rng.normal();
    const double tau = 0.2, h = 1e-6;
    NtXentResult<double> res = nt_xent_loss_grad<double>(e, tau);
    double max_rel = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            MatX<double> up = e, dn = e;
            up(i, j) += h;
            dn(i, j) -= h;
            const double fd = (nt_xent_loss<double>(up, tau) - nt_xent_loss<double>(dn, tau)) / (2 * h);
            max_rel = std::max(max_rel, std::abs(fd - res.grad(i, j)) / std::max(std::abs(fd), 1e-8));
        }
    report("criterion 3: NT-Xent gradient check", max_rel < 1e-4,
           "max relative error vs central differences = " + fmt(max_rel) + " (bound 1e-4)",
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// ---------------------------------------------------------------- criterion 4

void criterion_permutation_set() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string why;
    int worst_margin = 99;
    for (std::uint64_t seed : {101ull, 202ull, 303ull, 404ull, 505ull}) {
        PermutationSet greedy = generate_permutation_set(9, 1000, seed);
        std::set<std::vector<int>> unique(greedy.perms.begin(), greedy.perms.end());
        if (unique.size() != 1000) {
            pass = false;
            why = "duplicate permutations at seed " + std::to_string(seed);
            break;
        }
        // uniformly random distinct baseline with the same seed
        Rng rng(seed);
        std::set<std::vector<int>> baseline;
        while (baseline.size() < 1000) {
            std::vector<int> p(9);
            std::iota(p.begin(), p.end(), 0);
            rng.shuffle(p);
            baseline.insert(std::move(p));
        }
        int base_min = 9;
        std::vector<std::vector<int>> base_vec(baseline.begin(), baseline.end());
        for (std::size_t i = 0; i < base_vec.size(); ++i)
            for (std::size_t j = i + 1; j < base_vec.size(); ++j)
                base_min = std::min(base_min, hamming_distance(base_vec[i], base_vec[j]));
        worst_margin = std::min(worst_margin, greedy.min_hamming - base_min);
        if (greedy.min_hamming < base_min) {
            pass = false;
            why = "greedy min Hamming " + std::to_string(greedy.min_hamming) + " < random baseline " +
                  std::to_string(base_min) + " at seed " + std::to_string(seed);
            break;
        }
    }
    if (pass) {
        PermutationSet set = generate_permutation_set(9, 1000, 777);
        const std::string path = (fs::temp_directory_path() / "acc_perms.txt").string();
        save_permutation_set(path, set, 777);
        PermutationSet loaded = load_permutation_set(path);
        if (loaded.perms != set.perms || loaded.grid_cells != set.grid_cells) {
            pass = false;
            why = "serialization roundtrip not exact";
        }
    }
    report("criterion 4: permutation-set property", pass,
           pass ? "1000 distinct; min Hamming beats random baseline by >= " + std::to_string(worst_margin) +
                      " over 5 seeds; roundtrip exact"
                : why,
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// ---------------------------------------------------------------- criterion 5

void criterion_primitives() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string why;

    lnl::CoteachingConfig ct;
    ct.warmup_epochs = 10;
    ct.forget_rate_tau = 0.5;
    if (std::abs(lnl::forget_rate(5, ct) - 0.75) > 1e-12) {
        pass = false;
        why = "forget_rate(5; 0.5, 10) != 0.75";
    }

    const auto sharp = lnl::sharpen({0.8, 0.2}, 0.5);
    if (std::abs(sharp[0] - 0.9412) > 1e-4 || std::abs(sharp[1] - 0.0588) > 1e-4) {
        pass = false;
        why = "sharpen([0.8,0.2], 0.5) off";
    }

    RunRecord rec;
    for (double acc : {0.1, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4}) {
        EpochRow row;
        row.epoch = static_cast<int>(rec.rows.size());
        row.test_acc = acc;
        rec.rows.push_back(row);
    }
    TrialSummary s = best_last(rec);
    if (std::abs(s.best - 0.9) > 1e-12 || std::abs(s.last - 0.6) > 1e-12) {
        pass = false;
        why = "best_last mismatch";
    }

    Rng rng(90210);
    for (int trial = 0; trial < 1000 && pass; ++trial) {
        const int n = 1 + rng.uniform_int(200);
        std::vector<double> losses(n);
        for (double& x : losses) x = rng.uniform_int(16);
        const double keep = rng.uniform(0.001, 1.0);
        const auto got = lnl::small_loss_select(losses, keep);
        std::vector<std::size_t> oracle(n);
        std::iota(oracle.begin(), oracle.end(), 0);
        std::stable_sort(oracle.begin(), oracle.end(),
                         [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
        oracle.resize(static_cast<std::size_t>(std::ceil(keep * n)));
        std::sort(oracle.begin(), oracle.end());
        if (got != oracle) {
            pass = false;
            why = "small_loss_select diverged from the sort oracle at trial " + std::to_string(trial);
        }
    }
    report("criterion 5: primitive unit examples", pass,
           pass ? "forget_rate, sharpen, best_last exact; selection matches oracle on 1000 arrays" : why,
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// ------------------------------------------------------- training criteria

struct SharedData {
    DatasetSplit train;
    DatasetSplit test;
    nn::EncoderConfig enc;
};

struct CeOutcome {
    double best = 0, last = 0, memo5 = 0, memo_final = 0;
};

// The training criteria run at the artifact's desk-scale defaults (40 epochs,
// batch 128, SGD 0.01 with momentum 0.9, weight decay 1e-4, constant rate).
lnl::TrainConfig desk_train_config(std::uint64_t seed) {
    lnl::TrainConfig cfg = resolved_train(ExperimentConfig{}, seed);
    return cfg;
}

CeOutcome run_ce(const SharedData& d, double p, int trial, const std::string& checkpoint,
                 std::uint64_t master) {
    NoiseSpec spec{p, d.train.num_classes,
                   derive_seed(master, "noise/p=" + fmt(p) + "/trial=" + std::to_string(trial))};
    DatasetSplit noisy = inject_symmetric_noise(d.train, spec);
    TrainerView tv = make_trainer_view(noisy);
    TrainerView ev = make_trainer_view(d.test);
    lnl::GroundTruthEvaluator gt(noisy.records, d.train.num_classes);

    nn::Model<float> m = nn::build_model<float>(
        d.enc, nn::HeadSpec::classifier(d.train.num_classes),
        derive_seed(master, "init/net_a/p=" + fmt(p) + "/trial=" + std::to_string(trial)));
    if (!checkpoint.empty()) nn::load_checkpoint(m, checkpoint);

    lnl::TrainConfig cfg =
        desk_train_config(derive_seed(master, "train/p=" + fmt(p) + "/trial=" + std::to_string(trial)));
    RunRecord rec = lnl::train_cross_entropy(m, tv, ev, cfg, &gt);
    TrialSummary s = best_last(rec);
    return {s.best, s.last, rec.rows[5].memorization_rate, rec.rows.back().memorization_rate};
}

void criterion_memorization_trend(const SharedData& d) {
    const auto t0 = Clock::now();
    CeOutcome out[3];
    std::vector<std::function<void()>> jobs;
    for (int t = 0; t < 3; ++t) jobs.push_back([&, t]() { out[t] = run_ce(d, 0.8, t, "", 6001); });
    run_parallel(std::move(jobs));

    int ok = 0;
    std::string detail;
    for (int t = 0; t < 3; ++t) {
        const bool gap = (out[t].best - out[t].last) >= 0.05;
        const bool memo = out[t].memo_final > out[t].memo5;
        ok += (gap && memo) ? 1 : 0;
        detail += "seed" + std::to_string(t) + "(gap=" + fmt(out[t].best - out[t].last) + ",memo " +
                  fmt(out[t].memo5) + "->" + fmt(out[t].memo_final) + ") ";
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = ok >= 2 && secs < 900.0;
    report("criterion 6: memorization trend at p=0.8", pass,
           detail + "=> " + std::to_string(ok) + "/3 seeds (need >=2, <15min)", secs);
}

// returns the three random-init CE LAST values at p=0.6 for reuse by criterion 8
std::vector<double> criterion_pretraining_benefit(const SharedData& d) {
    const auto t0 = Clock::now();

    // rotation pretraining, single network (criterion allows rotation or contrastive)
    PretrainConfig pre;
    pre.pretext = "rotation";
    pre.epochs = 30;
    pre.batch_size = 64;
    pre.optimizer.kind = nn::OptimizerKind::Sgd;
    pre.optimizer.learning_rate = 0.01;
    pre.optimizer.momentum = 0.9;
    pre.optimizer.weight_decay = 1e-4;
    pre.lr_schedule = nn::LrSchedule::CosineAnnealing;
    pre.seed = derive_seed(7001, "pretrain/net_a");
    nn::Model<float> rot = nn::build_model<float>(d.enc, nn::HeadSpec::rotation(), pre.seed);
    pretrain_pretext(rot, d.train, pre, nullptr);
    const std::string ckpt = (fs::temp_directory_path() / "acc_rotation.ckpt").string();
    nn::Provenance prov;
    prov.pretext = "rotation";
    prov.dataset = "synthetic";
    prov.epochs = pre.epochs;
    prov.seed = pre.seed;
    nn::save_checkpoint(rot, prov, ckpt);

    CeOutcome rnd[3], pret[3];
    std::vector<std::function<void()>> jobs;
    for (int t = 0; t < 3; ++t) {
        jobs.push_back([&, t]() { rnd[t] = run_ce(d, 0.6, t, "", 7001); });
        jobs.push_back([&, t]() { pret[t] = run_ce(d, 0.6, t, ckpt, 7001); });
    }
    run_parallel(std::move(jobs));

    double mean_rnd = 0, mean_pre = 0;
    for (int t = 0; t < 3; ++t) {
        mean_rnd += rnd[t].last / 3;
        mean_pre += pret[t].last / 3;
    }
    double var_rnd = 0, var_pre = 0;
    for (int t = 0; t < 3; ++t) {
        var_rnd += (rnd[t].last - mean_rnd) * (rnd[t].last - mean_rnd) / 2;
        var_pre += (pret[t].last - mean_pre) * (pret[t].last - mean_pre) / 2;
    }
    const double pooled = std::sqrt((var_rnd + var_pre) / 2);
    const double gap = mean_pre - mean_rnd;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = gap > 0 && gap > pooled && secs < 2700.0;
    report("criterion 7: pretraining benefit at p=0.6", pass,
           "LAST random=" + fmt(mean_rnd) + " rotation-pretrained=" + fmt(mean_pre) + " gap=" + fmt(gap) +
               " pooled std=" + fmt(pooled) + " (<45min)",
           secs);
    return {rnd[0].last, rnd[1].last, rnd[2].last};
}

void criterion_lnl_benefit(const SharedData& d, const std::vector<double>& ce_last) {
    const auto t0 = Clock::now();
    const double p = 0.6;

    struct CtOut {
        double last = 0;
        double post_precision = 0;
    };
    CtOut ct_out[3];
    struct DmOut {
        bool completed = false;
        double post_precision = 0;
    };
    DmOut dm_out;

    std::vector<std::function<void()>> jobs;
    for (int t = 0; t < 3; ++t)
        jobs.push_back([&, t]() {
            NoiseSpec spec{p, 4, derive_seed(8001, "noise/trial=" + std::to_string(t))};
            DatasetSplit noisy = inject_symmetric_noise(d.train, spec);
            TrainerView tv = make_trainer_view(noisy);
            TrainerView ev = make_trainer_view(d.test);
            lnl::GroundTruthEvaluator gt(noisy.records, 4);
            nn::Model<float> a = nn::build_model<float>(
                d.enc, nn::HeadSpec::classifier(4), derive_seed(8001, "init/a/" + std::to_string(t)));
            nn::Model<float> b = nn::build_model<float>(
                d.enc, nn::HeadSpec::classifier(4), derive_seed(8001, "init/b/" + std::to_string(t)));
            lnl::TrainConfig cfg = desk_train_config(derive_seed(8001, "train/" + std::to_string(t)));
            lnl::CoteachingConfig ct;
            ct.warmup_epochs = 10;
            ct.forget_rate_tau = p;
            RunRecord rec = lnl::train_coteaching(a, b, tv, ev, cfg, ct, &gt);
            double prec = 0;
            int count = 0;
            for (std::size_t e = 10; e < rec.rows.size(); ++e) {
                prec += rec.rows[e].selection_precision;
                ++count;
            }
            ct_out[t] = {best_last(rec).last, prec / count};
        });
    jobs.push_back([&]() {
        NoiseSpec spec{p, 4, derive_seed(8002, "noise")};
        DatasetSplit noisy = inject_symmetric_noise(d.train, spec);
        TrainerView tv = make_trainer_view(noisy);
        TrainerView ev = make_trainer_view(d.test);
        lnl::GroundTruthEvaluator gt(noisy.records, 4);
        nn::Model<float> a =
            nn::build_model<float>(d.enc, nn::HeadSpec::classifier(4), derive_seed(8002, "init/a"));
        nn::Model<float> b =
            nn::build_model<float>(d.enc, nn::HeadSpec::classifier(4), derive_seed(8002, "init/b"));
        lnl::TrainConfig cfg = desk_train_config(derive_seed(8002, "train"));
        cfg.epochs = 16; // 10 warm-up + 6 dividemix epochs
        lnl::DivideMixConfig dm = resolved_dividemix(ExperimentConfig{}, p);
        dm.unlabeled_weight = 0.0;
        RunRecord rec = lnl::train_dividemix(a, b, tv, ev, cfg, dm, &gt);
        double prec = 0;
        int count = 0;
        for (std::size_t e = 10; e < rec.rows.size(); ++e)
            if (!std::isnan(rec.rows[e].selection_precision)) {
                prec += rec.rows[e].selection_precision;
                ++count;
            }
        dm_out.completed = rec.rows.size() == 16;
        dm_out.post_precision = count ? prec / count : 0.0;
    });
    run_parallel(std::move(jobs));

    double ct_mean = 0, ce_mean = 0, prec_min = 1.0;
    for (int t = 0; t < 3; ++t) {
        ct_mean += ct_out[t].last / 3;
        ce_mean += ce_last[t] / 3;
        prec_min = std::min(prec_min, ct_out[t].post_precision);
    }
    const bool pass = ct_mean > ce_mean && prec_min > 1.0 - p && dm_out.completed &&
                      dm_out.post_precision > 1.0 - p;
    report("criterion 8: LNL benefit at p=0.6", pass,
           "LAST coteaching=" + fmt(ct_mean) + " vs ce=" + fmt(ce_mean) + "; CT precision min=" +
               fmt(prec_min) + ", DM precision=" + fmt(dm_out.post_precision) + " (base rate 0.4); DM " +
               (dm_out.completed ? "completed" : "DID NOT COMPLETE"),
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// ---------------------------------------------------------------- criterion 9

void criterion_determinism() {
    const auto t0 = Clock::now();
    const fs::path dir = fs::temp_directory_path() / "acc_determinism";
    fs::remove_all(dir);

    ExperimentConfig cfg;
    cfg.dataset.kind = "synthetic";
    cfg.dataset.num_classes = 3;
    cfg.dataset.per_class = 30;
    cfg.dataset.test_per_class = 15;
    cfg.dataset.image_size = 16;
    cfg.noise_rates = {0.5};
    cfg.pretext = "none";
    cfg.lnl_method = "ce";
    cfg.trials = 2;
    cfg.seed = 99;
    cfg.out = (dir / "out").string();
    cfg.train_epochs = 6;
    cfg.train_batch = 16;

    cmd_train(cfg);
    auto read = [&](const char* f) {
        std::ifstream in(cfg.out + "/summary/" + f, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    const std::string trials1 = read("trials.csv"), agg1 = read("aggregate.csv");
    cmd_train(cfg);
    const bool pass = !trials1.empty() && trials1 == read("trials.csv") && agg1 == read("aggregate.csv");
    report("criterion 9: end-to-end determinism", pass,
           pass ? "two full train invocations wrote byte-identical summary CSVs"
                : "summary CSV bytes differ between identical runs",
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// --------------------------------------------------------------- criterion 10

void criterion_trainer_isolation() {
    const auto t0 = Clock::now();
    DatasetSplit train = make_synthetic_dataset(3, 30, 16, 16, derive_seed(555, "train"), "train");
    DatasetSplit test = make_synthetic_dataset(3, 15, 16, 16, derive_seed(555, "test"), "test");
    nn::EncoderConfig enc = nn::tiny_preset(16, 16, 1);

    DatasetSplit noisy = inject_symmetric_noise(train, {0.6, 3, 556});
    DatasetSplit scrambled = noisy;
    for (std::size_t i = 0; i < scrambled.size(); ++i) {
        scrambled.images[i].clean_label = (scrambled.records[i].observed_label + 1) % 3;
        scrambled.records[i].clean_label = scrambled.images[i].clean_label;
        scrambled.records[i].is_corrupted =
            scrambled.records[i].observed_label != scrambled.records[i].clean_label;
    }
    TrainerView tv1 = make_trainer_view(noisy), tv2 = make_trainer_view(scrambled);
    TrainerView ev = make_trainer_view(test);
    lnl::GroundTruthEvaluator gt1(noisy.records, 3), gt2(scrambled.records, 3);

    bool pass = true;
    std::string why;
    for (const std::string method : {"ce", "coteaching", "dividemix"}) {
        nn::Model<float> a1 = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 1);
        nn::Model<float> a2 = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 1);
        nn::Model<float> b1 = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 2);
        nn::Model<float> b2 = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 2);
        lnl::TrainConfig cfg;
        cfg.epochs = 4;
        cfg.batch_size = 16;
        cfg.seed = 60;
        RunRecord r1, r2;
        if (method == "ce") {
            r1 = lnl::train_cross_entropy(a1, tv1, ev, cfg, &gt1);
            r2 = lnl::train_cross_entropy(a2, tv2, ev, cfg, &gt2);
        } else if (method == "coteaching") {
            lnl::CoteachingConfig ct;
            ct.forget_rate_tau = 0.6;
            r1 = lnl::train_coteaching(a1, b1, tv1, ev, cfg, ct, &gt1);
            r2 = lnl::train_coteaching(a2, b2, tv2, ev, cfg, ct, &gt2);
        } else {
            lnl::DivideMixConfig dm;
            dm.warmup_epochs = 2;
            dm.batch_size = 16;
            r1 = lnl::train_dividemix(a1, b1, tv1, ev, cfg, dm, &gt1);
            r2 = lnl::train_dividemix(a2, b2, tv2, ev, cfg, dm, &gt2);
        }
        if (a1.parameter_hash() != a2.parameter_hash()) {
            pass = false;
            why = method + ": parameters changed when clean labels were perturbed";
        }
        for (std::size_t e = 0; e < r1.rows.size() && pass; ++e)
            if (r1.rows[e].test_acc != r2.rows[e].test_acc ||
                r1.rows[e].selected_count != r2.rows[e].selected_count) {
                pass = false;
                why = method + ": per-epoch trainer outputs diverged";
            }
    }
    report("criterion 10: trainer isolation from ground truth", pass,
           pass ? "perturbing clean labels changed no trainer output (ce, coteaching, dividemix)" : why,
           std::chrono::duration<double>(Clock::now() - t0).count());
}

// clean-data sanity oracle for the synthetic generator (spec example)
void preflight_clean_oracle(const SharedData& d) {
    const auto t0 = Clock::now();
    CeOutcome out = run_ce(d, 0.0, 0, "", 5001);
    report("preflight: clean-label oracle", out.best >= 0.95,
           "clean training test accuracy best=" + fmt(out.best) + " (need >= 0.95)",
           std::chrono::duration<double>(Clock::now() - t0).count());
}

} // namespace

int main() {
    std::printf("acceptance suite: %u hardware threads\n", std::thread::hardware_concurrency());
    const auto t0 = Clock::now();

    criterion_noise_statistics();
    criterion_gmm_oracle();
    criterion_ntxent_gradient();
    criterion_permutation_set();
    criterion_primitives();

    SharedData d;
    d.train = make_synthetic_dataset(4, 500, 32, 32, derive_seed(9001, "data/train"), "train");
    d.test = make_synthetic_dataset(4, 125, 32, 32, derive_seed(9001, "data/test"), "test");
    d.enc = nn::tiny_preset(32, 32, 1);

    preflight_clean_oracle(d);
    criterion_memorization_trend(d);
    const std::vector<double> ce_last = criterion_pretraining_benefit(d);
    criterion_lnl_benefit(d, ce_last);
    criterion_determinism();
    criterion_trainer_isolation();

    int failed = 0;
    for (const auto& r : g_results) failed += r.pass ? 0 : 1;
    std::printf("----\n%zu checks, %d failed, total %.1f min\n", g_results.size(), failed,
                std::chrono::duration<double>(Clock::now() - t0).count() / 60.0);
    return failed == 0 ? 0 : 1;
}
