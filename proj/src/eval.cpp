#include "sslnl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace sslnl {

namespace {

// Fixed-notation float formatting so identical runs write identical bytes.
std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

TrialSummary best_last(const RunRecord& record, int window) {
    check(window >= 1, "config", "LAST window must be >= 1");
    const std::size_t n = record.rows.size();
    check(static_cast<int>(n) >= window, "config",
          "best_last needs at least " + std::to_string(window) + " epochs, got " + std::to_string(n));

    TrialSummary out;
    out.seed = record.meta.seed;
    out.best = 0.0;
    for (const EpochRow& r : record.rows) out.best = std::max(out.best, r.test_acc);
    double acc = 0.0;
    for (std::size_t i = n - static_cast<std::size_t>(window); i < n; ++i) acc += record.rows[i].test_acc;
    out.last = acc / window;
    return out;
}

MemorizationResult memorization_from_predictions(const std::vector<int>& preds,
                                                 const std::vector<CorruptionRecord>& records) {
    check(preds.size() == records.size(), "shape", "prediction/record count mismatch");
    MemorizationResult out;
    long corrupted = 0, memorized = 0, clean_hits = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].is_corrupted) continue;
        ++corrupted;
        if (preds[i] == records[i].observed_label) ++memorized;
        if (preds[i] == records[i].clean_label) ++clean_hits;
    }
    if (corrupted == 0) {
        out.no_corrupted = true;
        return out;
    }
    out.rate = static_cast<double>(memorized) / corrupted;
    out.clean_acc = static_cast<double>(clean_hits) / corrupted;
    return out;
}

SelectionMetrics selection_metrics(const std::vector<char>& selected_mask,
                                   const std::vector<CorruptionRecord>& records, int num_classes) {
    check(selected_mask.size() == records.size(), "shape", "selection mask/record count mismatch");
    check(num_classes >= 2, "config", "selection_metrics needs num_classes >= 2");

    SelectionMetrics out;
    out.per_class.assign(static_cast<std::size_t>(num_classes), 0);
    long selected = 0, selected_clean = 0, clean_total = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const bool clean = !records[i].is_corrupted;
        if (clean) ++clean_total;
        if (!selected_mask[i]) continue;
        ++selected;
        out.per_class[static_cast<std::size_t>(records[i].observed_label)]++;
        if (clean) ++selected_clean;
    }
    if (selected == 0) {
        out.empty_selection = true;
        out.recall = 0.0;
        return out;
    }
    out.precision = static_cast<double>(selected_clean) / selected;
    out.recall = clean_total > 0 ? static_cast<double>(selected_clean) / clean_total : 0.0;
    return out;
}

std::vector<AggregateRow> aggregate_trials(const std::vector<TrialRow>& rows) {
    check(!rows.empty(), "config", "aggregate_trials on empty input");
    std::map<std::tuple<std::string, std::string, double>, std::vector<const TrialRow*>> groups;
    for (const TrialRow& r : rows) groups[{r.method, r.pretext, r.p}].push_back(&r);

    std::vector<AggregateRow> out;
    for (const auto& [key, members] : groups) {
        AggregateRow agg;
        agg.method = std::get<0>(key);
        agg.pretext = std::get<1>(key);
        agg.p = std::get<2>(key);
        agg.trials = static_cast<int>(members.size());
        double bsum = 0.0, lsum = 0.0;
        for (const TrialRow* r : members) {
            bsum += r->best;
            lsum += r->last;
        }
        agg.best_mean = bsum / agg.trials;
        agg.last_mean = lsum / agg.trials;
        if (agg.trials > 1) {
            double bvar = 0.0, lvar = 0.0;
            for (const TrialRow* r : members) {
                bvar += (r->best - agg.best_mean) * (r->best - agg.best_mean);
                lvar += (r->last - agg.last_mean) * (r->last - agg.last_mean);
            }
            agg.best_std = std::sqrt(bvar / (agg.trials - 1));
            agg.last_std = std::sqrt(lvar / (agg.trials - 1));
        }
        out.push_back(std::move(agg));
    }
    return out;
}

void write_trials_csv(const std::string& path, const std::vector<TrialRow>& rows,
                      const std::string& config_hash) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write trials CSV: " + path);
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    out << "method,pretext,p,seed,best,last\n";
    for (const TrialRow& r : rows)
        out << r.method << "," << r.pretext << "," << fmt(r.p) << "," << r.seed << "," << fmt(r.best) << ","
            << fmt(r.last) << "\n";
    check(out.good(), "io", "failed writing trials CSV: " + path);
}

namespace {

std::vector<std::vector<std::string>> read_csv_body(const std::string& path, std::size_t cols) {
    std::ifstream in(path);
    check(in.good(), "io", "cannot read CSV: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        check(fields.size() == cols, "io", "bad CSV row in " + path + ": " + line);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

std::vector<TrialRow> read_trials_csv(const std::string& path) {
    std::vector<TrialRow> out;
    for (const auto& f : read_csv_body(path, 6)) {
        TrialRow r;
        r.method = f[0];
        r.pretext = f[1];
        r.p = std::stod(f[2]);
        r.seed = std::stoull(f[3]);
        r.best = std::stod(f[4]);
        r.last = std::stod(f[5]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows,
                         const std::string& config_hash) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write aggregate CSV: " + path);
    if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
    out << "method,pretext,p,best_mean,best_std,last_mean,last_std,trials\n";
    for (const AggregateRow& r : rows)
        out << r.method << "," << r.pretext << "," << fmt(r.p) << "," << fmt(r.best_mean) << ","
            << fmt(r.best_std) << "," << fmt(r.last_mean) << "," << fmt(r.last_std) << "," << r.trials << "\n";
    check(out.good(), "io", "failed writing aggregate CSV: " + path);
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
    std::vector<AggregateRow> out;
    for (const auto& f : read_csv_body(path, 8)) {
        AggregateRow r;
        r.method = f[0];
        r.pretext = f[1];
        r.p = std::stod(f[2]);
        r.best_mean = std::stod(f[3]);
        r.best_std = std::stod(f[4]);
        r.last_mean = std::stod(f[5]);
        r.last_std = std::stod(f[6]);
        r.trials = std::stoi(f[7]);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace sslnl
