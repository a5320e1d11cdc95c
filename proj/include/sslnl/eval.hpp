#pragma once

#include <string>
#include <vector>

#include "sslnl/dataset.hpp"
#include "sslnl/run_record.hpp"

namespace sslnl {

struct TrialSummary {
    double best = 0.0; // max test accuracy over epochs
    double last = 0.0; // mean test accuracy over the final `window` epochs
    std::uint64_t seed = 0;
};

constexpr int kLastWindow = 5;

TrialSummary best_last(const RunRecord& record, int window = kLastWindow);

struct MemorizationResult {
    double rate = 0.0;            // corrupted samples predicted as their observed label
    double clean_acc = 0.0;       // corrupted samples predicted as their clean label
    bool no_corrupted = false;    // rate defined as 0 when nothing is corrupted
};

// preds aligned index-wise with records.
MemorizationResult memorization_from_predictions(const std::vector<int>& preds,
                                                 const std::vector<CorruptionRecord>& records);

struct SelectionMetrics {
    bool empty_selection = false;
    double precision = 0.0; // undefined (reported null) when nothing selected
    double recall = 0.0;
    std::vector<long> per_class; // selected counts by observed class
};

SelectionMetrics selection_metrics(const std::vector<char>& selected_mask,
                                   const std::vector<CorruptionRecord>& records, int num_classes);

struct TrialRow {
    std::string method;
    std::string pretext;
    double p = 0.0;
    std::uint64_t seed = 0;
    double best = 0.0;
    double last = 0.0;
};

struct AggregateRow {
    std::string method;
    std::string pretext;
    double p = 0.0;
    double best_mean = 0.0, best_std = 0.0;
    double last_mean = 0.0, last_std = 0.0;
    int trials = 0; // 1 => std fixed at 0, flagged by this count
};

// Group by (method, pretext, p); sample mean and (n-1)-denominator std.
std::vector<AggregateRow> aggregate_trials(const std::vector<TrialRow>& rows);

// CSV: method,pretext,p,seed,best,last
void write_trials_csv(const std::string& path, const std::vector<TrialRow>& rows,
                      const std::string& config_hash = "");
std::vector<TrialRow> read_trials_csv(const std::string& path);

// CSV: method,pretext,p,best_mean,best_std,last_mean,last_std,trials
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows,
                         const std::string& config_hash = "");
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);

} // namespace sslnl
