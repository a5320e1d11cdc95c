#include "sslnl/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "sslnl/nn/checkpoint.hpp"
#include "sslnl/plot.hpp"

namespace fs = std::filesystem;

namespace sslnl {

namespace {

std::string p_tag(double p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", p);
    return buf;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["dataset"] = {{"kind", c.dataset.kind},
                    {"num_classes", c.dataset.num_classes},
                    {"per_class", c.dataset.per_class},
                    {"test_per_class", c.dataset.test_per_class},
                    {"image_size", c.dataset.image_size},
                    {"root", c.dataset.root},
                    {"test_root", c.dataset.test_root},
                    {"class_names", c.dataset.class_names}};
    j["noise_rates"] = c.noise_rates;
    j["pretext"] = c.pretext;
    j["lnl_method"] = c.lnl_method;
    j["encoder"] = c.encoder;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["paper_scale"] = c.paper_scale;
    auto put_opt = [&](const char* key, const auto& opt) {
        if (opt) j["overrides"][key] = *opt;
    };
    put_opt("pretrain_epochs", c.pretrain_epochs);
    put_opt("pretrain_batch", c.pretrain_batch);
    put_opt("pretrain_lr", c.pretrain_lr);
    put_opt("train_epochs", c.train_epochs);
    put_opt("train_batch", c.train_batch);
    put_opt("train_lr", c.train_lr);
    put_opt("dm_lambda_u", c.dm_lambda_u);
    put_opt("puzzle_patch_size", c.puzzle_patch_size);
    return j;
}

void require_in(const std::string& value, const std::set<std::string>& allowed, const char* what) {
    if (!allowed.count(value)) {
        std::string opts;
        for (const std::string& a : allowed) opts += (opts.empty() ? "" : "|") + a;
        fail("config", std::string(what) + " must be one of {" + opts + "}, got '" + value + "'");
    }
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "config", "cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    check(!j.is_discarded(), "config", "config file is not valid JSON: " + path);

    ExperimentConfig c;
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        c.dataset.kind = d.value("kind", "synthetic");
        c.dataset.num_classes = d.value("num_classes", 4);
        c.dataset.per_class = d.value("per_class", 500);
        c.dataset.test_per_class = d.value("test_per_class", 125);
        c.dataset.image_size = d.value("image_size", 32);
        c.dataset.root = d.value("root", "");
        c.dataset.test_root = d.value("test_root", "");
        if (d.contains("class_names")) c.dataset.class_names = d["class_names"].get<std::vector<std::string>>();
    }
    if (j.contains("noise_rates")) c.noise_rates = j["noise_rates"].get<std::vector<double>>();
    c.pretext = j.value("pretext", "none");
    c.lnl_method = j.value("lnl_method", "ce");
    c.encoder = j.value("encoder", "tiny");
    c.trials = j.value("trials", 3);
    c.seed = j.value("seed", std::uint64_t{1});
    c.out = j.value("out", "results");
    c.paper_scale = j.value("paper_scale", false);

    const auto& ov = j.contains("overrides") ? j["overrides"] : nlohmann::json::object();
    if (ov.contains("pretrain_epochs")) c.pretrain_epochs = ov["pretrain_epochs"].get<int>();
    if (ov.contains("pretrain_batch")) c.pretrain_batch = ov["pretrain_batch"].get<int>();
    if (ov.contains("pretrain_lr")) c.pretrain_lr = ov["pretrain_lr"].get<double>();
    if (ov.contains("train_epochs")) c.train_epochs = ov["train_epochs"].get<int>();
    if (ov.contains("train_batch")) c.train_batch = ov["train_batch"].get<int>();
    if (ov.contains("train_lr")) c.train_lr = ov["train_lr"].get<double>();
    if (ov.contains("dm_lambda_u")) c.dm_lambda_u = ov["dm_lambda_u"].get<double>();
    if (ov.contains("puzzle_patch_size")) c.puzzle_patch_size = ov["puzzle_patch_size"].get<int>();

    require_in(c.dataset.kind, {"synthetic", "folder"}, "dataset.kind");
    require_in(c.pretext, {"none", "rotation", "jigsaw", "jigmag", "contrastive"}, "pretext");
    require_in(c.lnl_method, {"ce", "coteaching", "dividemix"}, "lnl_method");
    require_in(c.encoder, {"tiny", "resnet18like"}, "encoder");
    check(c.trials >= 1, "config", "trials must be >= 1");
    check(!c.noise_rates.empty(), "config", "noise_rates must be nonempty");
    for (double p : c.noise_rates) check(p >= 0.0 && p <= 1.0, "config", "noise rate must be in [0,1]");
    if (c.dataset.kind == "folder") {
        check(!c.dataset.root.empty(), "config", "folder dataset needs a root");
        check(!c.dataset.test_root.empty(), "config", "folder dataset needs a test_root");
    }
    return c;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    const std::string canon = config_to_json(cfg).dump();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

void echo_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write config echo: " + path);
    nlohmann::json j = config_to_json(cfg);
    j["config_hash"] = config_hash_hex(cfg);
    out << j.dump(2) << "\n";
}

PretrainConfig resolved_pretrain(const ExperimentConfig& cfg) {
    PretrainConfig p;
    p.pretext = cfg.pretext;
    p.optimizer.weight_decay = 1e-4;
    p.lr_schedule = nn::LrSchedule::CosineAnnealing;
    if (cfg.pretext == "rotation") {
        p.optimizer.kind = nn::OptimizerKind::Sgd;
        p.optimizer.learning_rate = 0.01;
        p.optimizer.momentum = 0.9;
        p.epochs = cfg.paper_scale ? 70 : 30;
        p.batch_size = cfg.paper_scale ? 256 : 64;
    } else if (cfg.pretext == "jigsaw" || cfg.pretext == "jigmag") {
        p.optimizer.kind = nn::OptimizerKind::Adam;
        p.optimizer.learning_rate = 0.001;
        p.epochs = cfg.paper_scale ? 50 : 25;
        p.batch_size = cfg.paper_scale ? 128 : 64;
    } else { // contrastive
        p.optimizer.kind = nn::OptimizerKind::Adam;
        p.optimizer.learning_rate = 0.001;
        p.epochs = cfg.paper_scale ? 100 : 40;
        p.batch_size = cfg.paper_scale ? 256 : 64;
    }
    p.puzzle_patch_size = cfg.puzzle_patch_size.value_or(cfg.paper_scale ? 64 : 16);
    if (cfg.pretrain_epochs) p.epochs = *cfg.pretrain_epochs;
    if (cfg.pretrain_batch) p.batch_size = *cfg.pretrain_batch;
    if (cfg.pretrain_lr) p.optimizer.learning_rate = *cfg.pretrain_lr;
    return p;
}

lnl::TrainConfig resolved_train(const ExperimentConfig& cfg, std::uint64_t run_seed) {
    lnl::TrainConfig t;
    t.optimizer.kind = nn::OptimizerKind::Sgd;
    t.optimizer.learning_rate = cfg.train_lr.value_or(0.01);
    t.optimizer.momentum = 0.9;
    t.optimizer.weight_decay = 1e-4;
    t.lr_schedule = nn::LrSchedule::Constant;
    t.epochs = cfg.train_epochs.value_or(cfg.paper_scale ? 50 : 40);
    t.batch_size = cfg.train_batch.value_or(cfg.paper_scale ? 256 : 128);
    t.seed = run_seed;
    return t;
}

lnl::CoteachingConfig resolved_coteaching(const ExperimentConfig& cfg, double noise_rate) {
    (void)cfg;
    lnl::CoteachingConfig ct;
    ct.warmup_epochs = 10;
    ct.forget_rate_tau = noise_rate; // tau = p
    ct.exponent = 1.0;
    return ct;
}

lnl::DivideMixConfig resolved_dividemix(const ExperimentConfig& cfg, double noise_rate) {
    lnl::DivideMixConfig dm;
    dm.warmup_epochs = 10;
    dm.augmentations_per_sample = 2;
    dm.sharpen_temperature = 0.2;
    dm.mixup_alpha = 4.0;
    dm.clean_threshold = 0.2;
    dm.unlabeled_weight = cfg.dm_lambda_u.value_or(noise_rate >= 0.75 ? 0.25 : 0.0);
    dm.batch_size = cfg.train_batch.value_or(128);
    return dm;
}

namespace {

struct LoadedData {
    DatasetSplit train;
    DatasetSplit test;
};

LoadedData load_data(const ExperimentConfig& cfg) {
    LoadedData d;
    if (cfg.dataset.kind == "synthetic") {
        d.train = make_synthetic_dataset(cfg.dataset.num_classes, cfg.dataset.per_class,
                                         cfg.dataset.image_size, cfg.dataset.image_size,
                                         derive_seed(cfg.seed, "data/train"), "train");
        d.test = make_synthetic_dataset(cfg.dataset.num_classes, cfg.dataset.test_per_class,
                                        cfg.dataset.image_size, cfg.dataset.image_size,
                                        derive_seed(cfg.seed, "data/test"), "test");
    } else {
        d.train = load_image_folder(cfg.dataset.root, cfg.dataset.image_size, cfg.dataset.image_size,
                                    cfg.dataset.class_names, "train");
        d.test = load_image_folder(cfg.dataset.test_root, cfg.dataset.image_size, cfg.dataset.image_size,
                                   cfg.dataset.class_names.empty() ? std::vector<std::string>{}
                                                                   : cfg.dataset.class_names,
                                   "test");
        check(d.train.num_classes == d.test.num_classes, "config",
              "train/test class count mismatch between " + cfg.dataset.root + " and " + cfg.dataset.test_root);
    }
    return d;
}

nn::EncoderConfig encoder_for(const ExperimentConfig& cfg, const LoadedData& data) {
    const Image& probe = data.train.images.at(0).pixels;
    return nn::preset_by_name(cfg.encoder, probe.h, probe.w, probe.c);
}

bool is_dual(const std::string& method) { return method == "coteaching" || method == "dividemix"; }

std::string ckpt_path(const ExperimentConfig& cfg, const std::string& net) {
    return cfg.out + "/checkpoints/" + cfg.pretext + "_" + net + ".ckpt";
}

} // namespace

std::vector<std::string> cmd_pretrain(const ExperimentConfig& cfg, lnl::Logger log) {
    fs::create_directories(cfg.out + "/checkpoints");
    echo_config(cfg, cfg.out + "/config_echo.json");

    if (cfg.pretext == "none") {
        const std::string marker = cfg.out + "/checkpoints/none.marker";
        std::ofstream m(marker);
        check(m.good(), "io", "cannot write marker: " + marker);
        m << "pretext=none config_hash=" << config_hash_hex(cfg) << "\n";
        if (log) log("pretext=none: wrote marker, downstream training uses default init");
        return {marker};
    }

    const LoadedData data = load_data(cfg);
    const PretrainConfig pre = resolved_pretrain(cfg);
    const Image& probe = data.train.images.at(0).pixels;

    PermutationSet perms;
    const bool is_puzzle = (cfg.pretext == "jigsaw" || cfg.pretext == "jigmag");
    if (is_puzzle) {
        perms = generate_permutation_set(9, pre.permutation_count, derive_seed(cfg.seed, "perms"));
        save_permutation_set(cfg.out + "/checkpoints/permutations.txt", perms, derive_seed(cfg.seed, "perms"));
    }

    const int nets = is_dual(cfg.lnl_method) ? 2 : 1;
    std::vector<std::string> paths;
    for (int ni = 0; ni < nets; ++ni) {
        const std::string net = (ni == 0) ? "net_a" : "net_b";
        PretrainConfig pre_n = pre;
        pre_n.seed = derive_seed(cfg.seed, "pretrain/" + net);

        nn::EncoderConfig enc = encoder_for(cfg, data);
        adapt_encoder_input(enc, pre_n, probe.h, probe.w, probe.c);
        nn::Model<float> model = nn::build_model<float>(enc, pretext_head(pre_n), pre_n.seed);

        const PretrainTrace trace =
            pretrain_pretext(model, data.train, pre_n, is_puzzle ? &perms : nullptr, log);

        nn::Provenance prov;
        prov.pretext = cfg.pretext;
        prov.dataset = cfg.dataset.label();
        prov.epochs = pre_n.epochs;
        prov.seed = pre_n.seed;
        prov.config_hash = config_hash_hex(cfg);
        const std::string path = ckpt_path(cfg, net);
        nn::save_checkpoint(model, prov, path);

        nlohmann::json tj;
        tj["loss"] = trace.epoch_loss;
        tj["accuracy"] = trace.epoch_accuracy;
        std::ofstream tout(path + ".trace.json");
        tout << tj.dump(2) << "\n";

        paths.push_back(path);
        if (log) log("saved checkpoint " + path);
    }
    return paths;
}

namespace {

struct TrialJob {
    double p;
    int trial;
};

struct TrialResult {
    TrialRow row;
    std::string error; // empty on success
};

TrialResult run_single_trial(const ExperimentConfig& cfg, const LoadedData& data,
                             const nn::EncoderConfig& enc, const TrialJob& job, lnl::Logger log) {
    TrialResult result;
    try {
        const std::string tag = "p=" + p_tag(job.p) + "/trial=" + std::to_string(job.trial);
        const std::uint64_t run_seed = derive_seed(cfg.seed, "train/" + tag);

        NoiseSpec spec;
        spec.noise_rate = job.p;
        spec.num_classes = data.train.num_classes;
        spec.seed = derive_seed(cfg.seed, "noise/" + tag);
        DatasetSplit noisy = inject_symmetric_noise(data.train, spec);
        save_records_jsonl(cfg.out + "/runs/noise_p" + p_tag(job.p) + "_t" + std::to_string(job.trial) +
                               ".jsonl",
                           noisy);

        const TrainerView train_view = make_trainer_view(noisy);
        const TrainerView test_view = make_trainer_view(data.test);
        lnl::GroundTruthEvaluator gt(noisy.records, noisy.num_classes);

        const nn::HeadSpec head = nn::HeadSpec::classifier(data.train.num_classes);
        nn::Model<float> model_a =
            nn::build_model<float>(enc, head, derive_seed(cfg.seed, "init/net_a/" + tag));
        if (cfg.pretext != "none") nn::load_checkpoint(model_a, ckpt_path(cfg, "net_a"));

        lnl::TrainConfig tcfg = resolved_train(cfg, run_seed);
        RunRecord record;
        if (cfg.lnl_method == "ce") {
            record = lnl::train_cross_entropy(model_a, train_view, test_view, tcfg, &gt, log);
        } else {
            nn::Model<float> model_b =
                nn::build_model<float>(enc, head, derive_seed(cfg.seed, "init/net_b/" + tag));
            if (cfg.pretext != "none") nn::load_checkpoint(model_b, ckpt_path(cfg, "net_b"));
            if (cfg.lnl_method == "coteaching") {
                record = lnl::train_coteaching(model_a, model_b, train_view, test_view, tcfg,
                                               resolved_coteaching(cfg, job.p), &gt, log);
            } else {
                record = lnl::train_dividemix(model_a, model_b, train_view, test_view, tcfg,
                                              resolved_dividemix(cfg, job.p), &gt, log);
            }
        }

        record.meta.method = cfg.lnl_method;
        record.meta.pretext = cfg.pretext;
        record.meta.dataset = cfg.dataset.label();
        record.meta.noise_rate = job.p;
        record.meta.seed = run_seed;
        record.meta.config_hash = config_hash_hex(cfg);
        save_run_record(cfg.out + "/runs/" + cfg.lnl_method + "_" + cfg.pretext + "_p" + p_tag(job.p) +
                            "_t" + std::to_string(job.trial) + ".jsonl",
                        record);

        const TrialSummary summary = best_last(record);
        result.row = {cfg.lnl_method, cfg.pretext, job.p, run_seed, summary.best, summary.last};
    } catch (const Error& e) {
        result.error = std::string(e.category()) + ": " + e.what();
    }
    return result;
}

} // namespace

void cmd_train(const ExperimentConfig& cfg, lnl::Logger log) {
    fs::create_directories(cfg.out + "/runs");
    fs::create_directories(cfg.out + "/summary");
    echo_config(cfg, cfg.out + "/config_echo.json");

    if (cfg.pretext != "none") {
        check(fs::exists(ckpt_path(cfg, "net_a")), "config",
              "missing checkpoint " + ckpt_path(cfg, "net_a") + "; run `pretrain` first");
        if (is_dual(cfg.lnl_method))
            check(fs::exists(ckpt_path(cfg, "net_b")), "config",
                  "missing checkpoint " + ckpt_path(cfg, "net_b") + "; dual-network methods need two");
    }

    const LoadedData data = load_data(cfg);
    const nn::EncoderConfig enc = encoder_for(cfg, data);

    std::vector<TrialJob> jobs;
    for (double p : cfg.noise_rates)
        for (int t = 0; t < cfg.trials; ++t) jobs.push_back({p, t});

    std::vector<TrialResult> results(jobs.size());
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(jobs.size())));
    std::mutex log_mutex;
    lnl::Logger safe_log;
    if (log)
        safe_log = [&](const std::string& msg) {
            std::lock_guard<std::mutex> guard(log_mutex);
            log(msg);
        };

    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex next_mutex;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> guard(next_mutex);
                    if (next >= jobs.size()) return;
                    mine = next++;
                }
                results[mine] = run_single_trial(cfg, data, enc, jobs[mine], safe_log);
            }
        });
    for (std::thread& t : pool) t.join();

    std::vector<TrialRow> rows;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!results[i].error.empty())
            fail("train", "trial p=" + p_tag(jobs[i].p) + " t=" + std::to_string(jobs[i].trial) +
                              " failed: " + results[i].error);
        rows.push_back(results[i].row);
    }
    std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
        return std::tie(a.method, a.pretext, a.p, a.seed) < std::tie(b.method, b.pretext, b.p, b.seed);
    });

    const std::string hash = config_hash_hex(cfg);
    write_trials_csv(cfg.out + "/summary/trials.csv", rows, hash);
    write_aggregate_csv(cfg.out + "/summary/aggregate.csv", aggregate_trials(rows), hash);
    if (log) log("wrote " + cfg.out + "/summary/trials.csv and aggregate.csv");
}

namespace {

std::string series_name(const AggregateRow& r) {
    return r.method + (r.pretext == "none" ? "" : "+" + r.pretext);
}

void write_sidecar(const std::string& path, const std::vector<AggregateRow>& rows) {
    write_aggregate_csv(path, rows);
}

void warn_gaps(const std::vector<AggregateRow>& rows, lnl::Logger& log) {
    std::set<double> all_p;
    std::map<std::string, std::set<double>> per_series;
    for (const AggregateRow& r : rows) {
        all_p.insert(r.p);
        per_series[series_name(r)].insert(r.p);
    }
    for (const auto& [name, ps] : per_series)
        if (ps.size() < all_p.size() && log)
            log("warning: series '" + name + "' is missing " + std::to_string(all_p.size() - ps.size()) +
                " noise-rate point(s); plotted with gaps");
    for (const AggregateRow& r : rows)
        if (r.trials < 2 && log)
            log("warning: group '" + series_name(r) + "' p=" + p_tag(r.p) + " has a single trial; no shading");
}

} // namespace

void cmd_plot(const std::string& results_dir, const std::string& figure, lnl::Logger log) {
    const std::string summary = results_dir + "/summary/trials.csv";
    check(fs::exists(summary), "io", "no summary CSV at " + summary + "; run `train` first");
    const std::vector<TrialRow> trials = read_trials_csv(summary);
    check(!trials.empty(), "io", "summary CSV holds no trials: " + summary);
    const std::vector<AggregateRow> agg = aggregate_trials(trials);
    fs::create_directories(results_dir + "/plots");
    const std::string plot_dir = results_dir + "/plots/";

    const bool all = (figure == "all");
    bool matched = false;
    warn_gaps(agg, log);

    if (all || figure == "noise-curve") {
        matched = true;
        std::map<std::string, std::vector<const AggregateRow*>> groups;
        for (const AggregateRow& r : agg) groups[series_name(r)].push_back(&r);
        std::vector<PlotSeries> series;
        for (const auto& [name, rows] : groups) {
            PlotSeries best{name + " best", {}, {}, {}}, last{name + " last", {}, {}, {}};
            for (const AggregateRow* r : rows) {
                best.x.push_back(r->p);
                best.y.push_back(r->best_mean);
                best.yerr.push_back(r->best_std);
                last.x.push_back(r->p);
                last.y.push_back(r->last_mean);
                last.yerr.push_back(r->last_std);
            }
            series.push_back(std::move(best));
            series.push_back(std::move(last));
        }
        render_line_chart(plot_dir + "noise_curve", "test accuracy vs noise rate", "noise rate p",
                          "test accuracy", series);
        write_sidecar(plot_dir + "noise_curve.csv", agg);
        if (log) log("wrote " + plot_dir + "noise_curve.{png,svg,csv}");
    }
    if (all || figure == "ce-bars") {
        matched = true;
        std::vector<AggregateRow> ce_rows;
        for (const AggregateRow& r : agg)
            if (r.method == "ce") ce_rows.push_back(r);
        if (ce_rows.empty()) {
            if (log) log("warning: no cross-entropy rows; ce-bars skipped");
        } else {
            std::set<double> ps;
            std::set<std::string> pretexts;
            for (const AggregateRow& r : ce_rows) {
                ps.insert(r.p);
                pretexts.insert(r.pretext);
            }
            std::vector<std::string> group_labels;
            for (double p : ps) group_labels.push_back("p=" + p_tag(p));
            for (const char* metric : {"best", "last"}) {
                std::vector<PlotSeries> series;
                for (const std::string& pre : pretexts) {
                    PlotSeries s{pre, {}, {}, {}};
                    for (double p : ps) {
                        double mean = 0.0, sd = 0.0;
                        for (const AggregateRow& r : ce_rows)
                            if (r.pretext == pre && r.p == p) {
                                mean = std::string(metric) == "best" ? r.best_mean : r.last_mean;
                                sd = std::string(metric) == "best" ? r.best_std : r.last_std;
                            }
                        s.y.push_back(mean);
                        s.yerr.push_back(sd);
                        s.x.push_back(p);
                    }
                    series.push_back(std::move(s));
                }
                render_bar_chart(plot_dir + "ce_bars_" + metric,
                                 std::string("cross-entropy ") + metric + " accuracy by pretraining",
                                 group_labels, "test accuracy", series);
            }
            write_sidecar(plot_dir + "ce_bars.csv", ce_rows);
            if (log) log("wrote " + plot_dir + "ce_bars_{best,last}.{png,svg} and ce_bars.csv");
        }
    }
    if (all || figure == "lnl-curves") {
        matched = true;
        std::map<std::string, std::vector<const AggregateRow*>> groups;
        for (const AggregateRow& r : agg) groups[series_name(r)].push_back(&r);
        for (const char* metric : {"best", "last"}) {
            std::vector<PlotSeries> series;
            for (const auto& [name, rows] : groups) {
                PlotSeries s{name, {}, {}, {}};
                for (const AggregateRow* r : rows) {
                    s.x.push_back(r->p);
                    s.y.push_back(std::string(metric) == "best" ? r->best_mean : r->last_mean);
                    s.yerr.push_back(std::string(metric) == "best" ? r->best_std : r->last_std);
                }
                series.push_back(std::move(s));
            }
            render_line_chart(plot_dir + "lnl_curves_" + metric,
                              std::string("lnl methods, ") + metric + " accuracy", "noise rate p",
                              "test accuracy", series);
        }
        write_sidecar(plot_dir + "lnl_curves.csv", agg);
        if (log) log("wrote " + plot_dir + "lnl_curves_{best,last}.{png,svg} and lnl_curves.csv");
    }
    check(matched, "usage", "unknown figure '" + figure + "' (noise-curve|ce-bars|lnl-curves|all)");
}

std::string cmd_report(const std::string& results_dir) {
    const std::string summary = results_dir + "/summary/trials.csv";
    check(fs::exists(summary), "io", "no summary CSV at " + summary + "; run `train` first");
    const std::vector<TrialRow> trials = read_trials_csv(summary);
    check(!trials.empty(), "io", "summary CSV holds no trials: " + summary);
    const std::vector<AggregateRow> agg = aggregate_trials(trials);
    write_aggregate_csv(results_dir + "/summary/aggregate.csv", agg);

    std::ostringstream os;
    os << "method       pretext      p     best (mean+-std)   last (mean+-std)   trials\n";
    for (const AggregateRow& r : agg) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-12s %-12s %-5.2f %.4f +- %.4f   %.4f +- %.4f   %d\n",
                      r.method.c_str(), r.pretext.c_str(), r.p, r.best_mean, r.best_std, r.last_mean,
                      r.last_std, r.trials);
        os << line;
    }
    return os.str();
}

} // namespace sslnl
