#include "sslnl/run_record.hpp"

#include <fstream>

#include <json.hpp>

#include "sslnl/common.hpp"

namespace sslnl {

namespace {

nlohmann::ordered_json row_to_json(const EpochRow& r) {
    nlohmann::ordered_json j;
    j["epoch"] = r.epoch;
    j["train_acc_observed"] = r.train_acc_observed;
    j["test_acc"] = r.test_acc;
    j["memorization_rate"] = r.memorization_rate;
    j["corrupted_clean_acc"] = r.corrupted_clean_acc;
    if (!std::isnan(r.test_acc_b)) j["test_acc_b"] = r.test_acc_b;
    if (r.selected_count >= 0)
        j["selected_count"] = r.selected_count;
    else
        j["selected_count"] = nullptr;
    if (std::isnan(r.selection_precision))
        j["selection_precision"] = nullptr;
    else
        j["selection_precision"] = r.selection_precision;
    if (std::isnan(r.selection_recall))
        j["selection_recall"] = nullptr;
    else
        j["selection_recall"] = r.selection_recall;
    if (r.per_class_selected.empty())
        j["per_class_selected"] = nullptr;
    else
        j["per_class_selected"] = r.per_class_selected;
    if (r.has_gmm)
        j["gmm"] = {{"means", r.gmm_means}, {"weights", r.gmm_weights}};
    else
        j["gmm"] = nullptr;
    return j;
}

EpochRow row_from_json(const nlohmann::json& j) {
    EpochRow r;
    r.epoch = j.at("epoch").get<int>();
    r.train_acc_observed = j.at("train_acc_observed").get<double>();
    r.test_acc = j.at("test_acc").get<double>();
    r.memorization_rate = j.at("memorization_rate").get<double>();
    r.corrupted_clean_acc = j.value("corrupted_clean_acc", 0.0);
    if (j.contains("test_acc_b")) r.test_acc_b = j.at("test_acc_b").get<double>();
    if (!j.at("selected_count").is_null()) r.selected_count = j.at("selected_count").get<long>();
    if (!j.at("selection_precision").is_null()) r.selection_precision = j.at("selection_precision").get<double>();
    if (!j.at("selection_recall").is_null()) r.selection_recall = j.at("selection_recall").get<double>();
    if (!j.at("per_class_selected").is_null())
        r.per_class_selected = j.at("per_class_selected").get<std::vector<long>>();
    if (!j.at("gmm").is_null()) {
        r.has_gmm = true;
        const auto& g = j.at("gmm");
        r.gmm_means = {g.at("means")[0].get<double>(), g.at("means")[1].get<double>()};
        r.gmm_weights = {g.at("weights")[0].get<double>(), g.at("weights")[1].get<double>()};
    }
    return r;
}

} // namespace

void save_run_record(const std::string& path, const RunRecord& record) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write run record: " + path);
    for (const EpochRow& r : record.rows) out << row_to_json(r).dump() << "\n";
    check(out.good(), "io", "failed writing run record: " + path);

    nlohmann::ordered_json meta;
    meta["method"] = record.meta.method;
    meta["pretext"] = record.meta.pretext;
    meta["dataset"] = record.meta.dataset;
    meta["noise_rate"] = record.meta.noise_rate;
    meta["seed"] = record.meta.seed;
    meta["config_hash"] = record.meta.config_hash;
    std::ofstream mout(path + ".meta.json");
    check(mout.good(), "io", "cannot write run metadata: " + path + ".meta.json");
    mout << meta.dump(2) << "\n";
}

RunRecord load_run_record(const std::string& path) {
    RunRecord record;
    std::ifstream in(path);
    check(in.good(), "io", "cannot read run record: " + path);
    std::string line;
    int last_epoch = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        check(!j.is_discarded(), "io", "malformed JSON line in " + path);
        EpochRow r = row_from_json(j);
        check(r.epoch > last_epoch, "io", "epochs not strictly increasing in " + path);
        last_epoch = r.epoch;
        record.rows.push_back(std::move(r));
    }

    std::ifstream min(path + ".meta.json");
    if (min.good()) {
        nlohmann::json meta = nlohmann::json::parse(min, nullptr, false);
        if (!meta.is_discarded()) {
            record.meta.method = meta.value("method", "");
            record.meta.pretext = meta.value("pretext", "");
            record.meta.dataset = meta.value("dataset", "");
            record.meta.noise_rate = meta.value("noise_rate", 0.0);
            record.meta.seed = meta.value("seed", std::uint64_t{0});
            record.meta.config_hash = meta.value("config_hash", "");
        }
    }
    return record;
}

} // namespace sslnl
