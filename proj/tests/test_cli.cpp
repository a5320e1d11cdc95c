#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sslnl/experiment.hpp"
#include "sslnl/nn/checkpoint.hpp"

using namespace sslnl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "config.json";
    std::ofstream out(path);
    out << body;
    out.close();
    return path.string();
}

std::vector<char> file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// small synthetic setup that trains in seconds
std::string quick_config(const fs::path& out_dir, const std::string& pretext, const std::string& method,
                         const std::string& noise_rates = "[0.5]", int trials = 1) {
    return std::string("{\n") + "  \"dataset\": {\"kind\": \"synthetic\", \"num_classes\": 3, \"per_class\": 20, "
           "\"test_per_class\": 10, \"image_size\": 16},\n" +
           "  \"noise_rates\": " + noise_rates + ",\n" + "  \"pretext\": \"" + pretext + "\",\n" +
           "  \"lnl_method\": \"" + method + "\",\n" + "  \"encoder\": \"tiny\",\n" + "  \"trials\": " +
           std::to_string(trials) + ",\n" + "  \"seed\": 5,\n" + "  \"out\": \"" + out_dir.string() + "\",\n" +
           "  \"overrides\": {\"train_epochs\": 6, \"train_batch\": 16, \"pretrain_epochs\": 2, "
           "\"pretrain_batch\": 16, \"puzzle_patch_size\": 8}\n}";
}

} // namespace

TEST_CASE("config validation rejects unknown values with the config category") {
    const fs::path dir = fresh_dir("sslnl_cfg");
    const std::string path = write_config(dir, "{\"pretext\": \"sudoku\"}");
    try {
        load_experiment_config(path);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.category() == "config");
    }
    CHECK_THROWS_AS(load_experiment_config(write_config(dir, "not json at all")), Error);
    CHECK_THROWS_AS(load_experiment_config(write_config(dir, "{\"noise_rates\": [1.5]}")), Error);
    CHECK_THROWS_AS(load_experiment_config(write_config(dir, "{\"lnl_method\": \"magic\"}")), Error);
    CHECK_THROWS_AS(load_experiment_config((dir / "missing.json").string()), Error);
}

TEST_CASE("defaults follow the per-pretext table and paper-scale switches budgets") {
    const fs::path dir = fresh_dir("sslnl_cfg2");
    ExperimentConfig cfg = load_experiment_config(write_config(dir, "{\"pretext\": \"rotation\"}"));
    PretrainConfig rot = resolved_pretrain(cfg);
    CHECK(rot.optimizer.kind == nn::OptimizerKind::Sgd);
    CHECK(rot.optimizer.learning_rate == doctest::Approx(0.01));
    CHECK(rot.optimizer.weight_decay == doctest::Approx(1e-4));
    CHECK(rot.lr_schedule == nn::LrSchedule::CosineAnnealing);

    cfg.pretext = "jigsaw";
    PretrainConfig jig = resolved_pretrain(cfg);
    CHECK(jig.optimizer.kind == nn::OptimizerKind::Adam);
    CHECK(jig.optimizer.learning_rate == doctest::Approx(0.001));

    cfg.pretext = "contrastive";
    PretrainConfig con = resolved_pretrain(cfg);
    CHECK(con.optimizer.kind == nn::OptimizerKind::Adam);

    cfg.paper_scale = true;
    cfg.pretext = "rotation";
    PretrainConfig paper = resolved_pretrain(cfg);
    CHECK(paper.epochs == 70);
    CHECK(paper.batch_size == 256);
    CHECK(paper.puzzle_patch_size == 64);
    lnl::TrainConfig t = resolved_train(cfg, 1);
    CHECK(t.epochs == 50);
    CHECK(t.batch_size == 256);
    CHECK(t.optimizer.momentum == doctest::Approx(0.9));

    // lambda_u rule: 0 below p=0.75, 0.25 at p=0.8, overridable
    cfg.paper_scale = false;
    CHECK(resolved_dividemix(cfg, 0.6).unlabeled_weight == doctest::Approx(0.0));
    CHECK(resolved_dividemix(cfg, 0.8).unlabeled_weight == doctest::Approx(0.25));
    cfg.dm_lambda_u = 0.1;
    CHECK(resolved_dividemix(cfg, 0.8).unlabeled_weight == doctest::Approx(0.1));
    CHECK(resolved_coteaching(cfg, 0.7).forget_rate_tau == doctest::Approx(0.7));
}

TEST_CASE("pretrain with pretext none writes a marker only") {
    const fs::path dir = fresh_dir("sslnl_none");
    ExperimentConfig cfg = load_experiment_config(write_config(dir, quick_config(dir / "out", "none", "ce")));
    const auto paths = cmd_pretrain(cfg);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].find("none.marker") != std::string::npos);
    CHECK(fs::exists(paths[0]));
}

TEST_CASE("rotation pretrain emits a provenance-carrying checkpoint") {
    const fs::path dir = fresh_dir("sslnl_rotpre");
    ExperimentConfig cfg = load_experiment_config(write_config(dir, quick_config(dir / "out", "rotation", "ce")));
    const auto paths = cmd_pretrain(cfg);
    REQUIRE(paths.size() == 1);
    CHECK(fs::exists(paths[0]));
    nn::Provenance prov = nn::read_checkpoint_provenance(paths[0]);
    CHECK(prov.pretext == "rotation");
    CHECK(prov.epochs == 2);
    CHECK(!prov.config_hash.empty());
}

TEST_CASE("dual-network pretraining produces two distinct checkpoints") {
    const fs::path dir = fresh_dir("sslnl_dual");
    ExperimentConfig cfg =
        load_experiment_config(write_config(dir, quick_config(dir / "out", "rotation", "coteaching")));
    const auto paths = cmd_pretrain(cfg);
    REQUIRE(paths.size() == 2);
    nn::EncoderConfig enc = nn::tiny_preset(16, 16, 1);
    nn::Model<float> a = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 1);
    nn::Model<float> b = nn::build_model<float>(enc, nn::HeadSpec::classifier(3), 1);
    nn::load_checkpoint(a, paths[0]);
    nn::load_checkpoint(b, paths[1]);
    CHECK(a.parameter_hash() != b.parameter_hash());
}

TEST_CASE("jigsaw pretrain writes the permutation set file") {
    const fs::path dir = fresh_dir("sslnl_jig");
    ExperimentConfig cfg = load_experiment_config(write_config(dir, quick_config(dir / "out", "jigsaw", "ce")));
    cmd_pretrain(cfg);
    const std::string perms_path = (dir / "out" / "checkpoints" / "permutations.txt").string();
    REQUIRE(fs::exists(perms_path));
    PermutationSet set = load_permutation_set(perms_path);
    CHECK(set.grid_cells == 9);
    CHECK(set.size() == 1000);
}

TEST_CASE("train at p=0 produces runs with no corruption and a summary") {
    const fs::path dir = fresh_dir("sslnl_p0");
    ExperimentConfig cfg =
        load_experiment_config(write_config(dir, quick_config(dir / "out", "none", "ce", "[0.0]")));
    cmd_train(cfg);

    const auto records = load_records_jsonl((dir / "out" / "runs" / "noise_p0.00_t0.jsonl").string());
    for (const auto& rec : records) CHECK_FALSE(rec.is_corrupted);

    const auto trials = read_trials_csv((dir / "out" / "summary" / "trials.csv").string());
    REQUIRE(trials.size() == 1);
    CHECK(trials[0].method == "ce");
    CHECK(trials[0].p == doctest::Approx(0.0));

    RunRecord rec = load_run_record((dir / "out" / "runs" / "ce_none_p0.00_t0.jsonl").string());
    CHECK(rec.rows.size() == 6);
    CHECK(fs::exists(dir / "out" / "config_echo.json"));
}

TEST_CASE("a two-rate three-trial sweep persists six run records") {
    const fs::path dir = fresh_dir("sslnl_sweep");
    ExperimentConfig cfg = load_experiment_config(
        write_config(dir, quick_config(dir / "out", "none", "ce", "[0.5, 0.8]", 3)));
    cmd_train(cfg);
    int found = 0;
    for (const auto& entry : fs::directory_iterator(dir / "out" / "runs"))
        if (entry.path().string().find("ce_none_p") != std::string::npos &&
            entry.path().extension() == ".jsonl" &&
            entry.path().string().find("meta") == std::string::npos)
            ++found;
    CHECK(found == 6);
    const auto trials = read_trials_csv((dir / "out" / "summary" / "trials.csv").string());
    CHECK(trials.size() == 6);
    const auto agg = read_aggregate_csv((dir / "out" / "summary" / "aggregate.csv").string());
    CHECK(agg.size() == 2); // one row per noise rate
    for (const auto& row : agg) CHECK(row.trials == 3);
}

TEST_CASE("rerunning an identical config writes byte-identical summaries") {
    const fs::path dir = fresh_dir("sslnl_det");
    ExperimentConfig cfg =
        load_experiment_config(write_config(dir, quick_config(dir / "out", "none", "ce", "[0.5]", 2)));
    cmd_train(cfg);
    const auto first = file_bytes((dir / "out" / "summary" / "trials.csv").string());
    const auto first_agg = file_bytes((dir / "out" / "summary" / "aggregate.csv").string());
    cmd_train(cfg);
    CHECK(file_bytes((dir / "out" / "summary" / "trials.csv").string()) == first);
    CHECK(file_bytes((dir / "out" / "summary" / "aggregate.csv").string()) == first_agg);
}

TEST_CASE("train refuses to run with a missing checkpoint") {
    const fs::path dir = fresh_dir("sslnl_missing");
    ExperimentConfig cfg =
        load_experiment_config(write_config(dir, quick_config(dir / "out", "rotation", "ce")));
    try {
        cmd_train(cfg);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.category() == "config");
        CHECK(std::string(e.what()).find("pretrain") != std::string::npos);
    }
}

TEST_CASE("plot emits figures with machine-readable sidecars from a fixture") {
    const fs::path dir = fresh_dir("sslnl_plot");
    fs::create_directories(dir / "summary");
    std::vector<TrialRow> rows = {
        {"ce", "none", 0.5, 1, 0.80, 0.70},      {"ce", "none", 0.5, 2, 0.84, 0.74},
        {"ce", "none", 0.8, 1, 0.50, 0.30},      {"ce", "none", 0.8, 2, 0.54, 0.34},
        {"ce", "rotation", 0.5, 1, 0.90, 0.85},  {"ce", "rotation", 0.5, 2, 0.92, 0.87},
        {"ce", "rotation", 0.8, 1, 0.60, 0.52},  {"ce", "rotation", 0.8, 2, 0.62, 0.54},
        {"coteaching", "none", 0.5, 1, 0.88, 0.86}, {"coteaching", "none", 0.8, 1, 0.70, 0.66},
    };
    write_trials_csv((dir / "summary" / "trials.csv").string(), rows);

    cmd_plot(dir.string(), "all");
    for (const char* f : {"noise_curve.png", "noise_curve.svg", "noise_curve.csv", "ce_bars_best.png",
                          "ce_bars_last.svg", "ce_bars.csv", "lnl_curves_best.png", "lnl_curves_last.svg",
                          "lnl_curves.csv"})
        CHECK(fs::exists(dir / "plots" / f));

    // the sidecar is the data contract: rendered bar heights equal the CSV means
    const auto expected = aggregate_trials(rows);
    const auto sidecar = read_aggregate_csv((dir / "plots" / "ce_bars.csv").string());
    for (const auto& row : sidecar) {
        CHECK(row.method == "ce");
        bool matched = false;
        for (const auto& exp : expected)
            if (exp.method == row.method && exp.pretext == row.pretext && exp.p == row.p) {
                CHECK(row.best_mean == doctest::Approx(exp.best_mean).epsilon(1e-9));
                CHECK(row.last_mean == doctest::Approx(exp.last_mean).epsilon(1e-9));
                matched = true;
            }
        CHECK(matched);
    }

    CHECK_THROWS_AS(cmd_plot(dir.string(), "pie-chart"), Error);
}

TEST_CASE("single-trial plot still renders (no shading) with a warning") {
    const fs::path dir = fresh_dir("sslnl_plot1");
    fs::create_directories(dir / "summary");
    write_trials_csv((dir / "summary" / "trials.csv").string(), {{"ce", "none", 0.5, 1, 0.8, 0.7}});
    std::vector<std::string> warnings;
    cmd_plot(dir.string(), "noise-curve", [&](const std::string& msg) { warnings.push_back(msg); });
    CHECK(fs::exists(dir / "plots" / "noise_curve.png"));
    bool warned = false;
    for (const auto& w : warnings) warned = warned || w.find("single trial") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("report aggregates and prints one line per group") {
    const fs::path dir = fresh_dir("sslnl_report");
    fs::create_directories(dir / "summary");
    write_trials_csv((dir / "summary" / "trials.csv").string(),
                     {{"ce", "none", 0.5, 1, 0.8, 0.7}, {"ce", "none", 0.5, 2, 0.9, 0.8},
                      {"dividemix", "rotation", 0.8, 1, 0.6, 0.55}});
    const std::string table = cmd_report(dir.string());
    CHECK(table.find("ce") != std::string::npos);
    CHECK(table.find("dividemix") != std::string::npos);
    CHECK(fs::exists(dir / "summary" / "aggregate.csv"));
    const auto agg = read_aggregate_csv((dir / "summary" / "aggregate.csv").string());
    CHECK(agg.size() == 2);
}

TEST_CASE("config hash is stable and sensitive to content") {
    const fs::path dir = fresh_dir("sslnl_hash");
    ExperimentConfig a = load_experiment_config(write_config(dir, quick_config(dir / "out", "none", "ce")));
    ExperimentConfig b = a;
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    b.seed = 6;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
}
