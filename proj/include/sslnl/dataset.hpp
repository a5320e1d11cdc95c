#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sslnl/image.hpp"

namespace sslnl {

struct LabeledImage {
    Image pixels;
    int clean_label = 0;
    std::string id; // unique within a split; stable across runs
};

struct NoiseSpec {
    double noise_rate = 0.0; // p
    int num_classes = 2;     // K
    std::uint64_t seed = 0;
};

struct CorruptionRecord {
    std::string id;
    int clean_label = 0;
    int observed_label = 0;
    bool is_corrupted = false;
    std::string path = "synthetic";
};

struct DatasetSplit {
    std::vector<LabeledImage> images;
    std::vector<CorruptionRecord> records; // aligned with images by index and id
    int num_classes = 0;
    std::string name; // "train" or "test"

    std::size_t size() const { return images.size(); }
};

// What trainers are allowed to see: pixels, ids, and observed labels only.
// Built from a DatasetSplit; clean labels are not copied in.
struct TrainerView {
    std::vector<const Image*> pixels;
    std::vector<int> observed_labels;
    std::vector<std::string> ids;
    int num_classes = 0;

    std::size_t size() const { return pixels.size(); }
};

TrainerView make_trainer_view(const DatasetSplit& split);

// root/<class_name>/<file>.png|jpg, labels = position in class_names,
// lexicographic file order within each class directory.
DatasetSplit load_image_folder(const std::string& root, int image_h, int image_w,
                               const std::vector<std::string>& class_names,
                               const std::string& split_name = "train");

// Class-conditional gratings + blob layouts + noise; separable by a small CNN
// but with enough per-sample variation that labels still matter.
DatasetSplit make_synthetic_dataset(int num_classes, int per_class, int image_h, int image_w,
                                    std::uint64_t seed, const std::string& split_name = "train");

// Symmetric close-set flip: with probability p the observed label is drawn
// uniformly from the K-1 wrong classes. Per-sample RNG is keyed by
// (spec.seed, id), so the outcome for a sample is independent of dataset
// order. Refuses to touch a split named "test".
DatasetSplit inject_symmetric_noise(const DatasetSplit& split, const NoiseSpec& spec);

// K x K row-stochastic matrix: diagonal 1-p, off-diagonal p/(K-1).
std::vector<std::vector<double>> transition_matrix(const NoiseSpec& spec);

// JSON-lines, one record per sample:
// {"id":..,"clean_label":..,"observed_label":..,"is_corrupted":..,"path":..}
void save_records_jsonl(const std::string& path, const DatasetSplit& split);
std::vector<CorruptionRecord> load_records_jsonl(const std::string& path);

// Re-apply a previously saved noise realization onto a clean split (ids must match).
DatasetSplit apply_records(const DatasetSplit& split, const std::vector<CorruptionRecord>& records);

void validate(const NoiseSpec& spec);

} // namespace sslnl
