#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sslnl {

// One logged epoch. Fields that do not apply to a method are "null" in the
// persisted JSON: selected_count < 0, NaN metrics, empty per_class_selected.
struct EpochRow {
    int epoch = 0;
    double train_acc_observed = 0.0;
    double test_acc = 0.0;                   // network A for dual-network methods
    double test_acc_b = std::nan("");        // network B, dual-network methods only
    double memorization_rate = 0.0;
    double corrupted_clean_acc = 0.0; // accuracy of corrupted samples vs their clean labels
    long selected_count = -1;
    double selection_precision = std::nan("");
    double selection_recall = std::nan("");
    std::vector<long> per_class_selected;
    bool has_gmm = false;
    std::array<double, 2> gmm_means{{0.0, 0.0}};
    std::array<double, 2> gmm_weights{{0.0, 0.0}};
};

struct RunMeta {
    std::string method;  // "ce" | "coteaching" | "dividemix"
    std::string pretext; // "none" | "rotation" | ...
    std::string dataset;
    double noise_rate = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

struct RunRecord {
    RunMeta meta;
    std::vector<EpochRow> rows;
};

// JSON-lines, one object per epoch; metadata goes to "<path>.meta.json".
void save_run_record(const std::string& path, const RunRecord& record);
RunRecord load_run_record(const std::string& path);

} // namespace sslnl
