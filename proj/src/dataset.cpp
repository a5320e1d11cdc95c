#include "sslnl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "sslnl/imageio.hpp"
#include "sslnl/rng.hpp"

namespace fs = std::filesystem;

namespace sslnl {

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

CorruptionRecord identity_record(const LabeledImage& img, std::string path) {
    CorruptionRecord rec;
    rec.id = img.id;
    rec.clean_label = img.clean_label;
    rec.observed_label = img.clean_label;
    rec.is_corrupted = false;
    rec.path = std::move(path);
    return rec;
}

} // namespace

void validate(const NoiseSpec& spec) {
    check(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0, "config", "noise_rate must be in [0,1]");
    check(spec.num_classes >= 2, "config", "num_classes must be >= 2");
}

TrainerView make_trainer_view(const DatasetSplit& split) {
    TrainerView view;
    view.num_classes = split.num_classes;
    view.pixels.reserve(split.size());
    view.observed_labels.reserve(split.size());
    view.ids.reserve(split.size());
    for (std::size_t i = 0; i < split.size(); ++i) {
        view.pixels.push_back(&split.images[i].pixels);
        view.observed_labels.push_back(split.records[i].observed_label);
        view.ids.push_back(split.images[i].id);
    }
    return view;
}

DatasetSplit load_image_folder(const std::string& root, int image_h, int image_w,
                               const std::vector<std::string>& class_names,
                               const std::string& split_name) {
    check(image_h > 0 && image_w > 0, "config", "image size must be positive");
    check(fs::is_directory(root), "io", "dataset root is not a directory: " + root);

    std::vector<std::string> names = class_names;
    if (names.empty()) {
        for (const auto& entry : fs::directory_iterator(root))
            if (entry.is_directory()) names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
        check(!names.empty(), "io", "dataset root has no class subdirectories: " + root);
    }

    DatasetSplit split;
    split.name = split_name;
    split.num_classes = static_cast<int>(names.size());

    for (std::size_t label = 0; label < names.size(); ++label) {
        const fs::path cls_dir = fs::path(root) / names[label];
        check(fs::is_directory(cls_dir), "io", "missing class directory: " + cls_dir.string());

        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cls_dir))
            if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
        check(!files.empty(), "io", "class directory holds no PNG/JPEG files: " + cls_dir.string());
        std::sort(files.begin(), files.end());

        for (const fs::path& file : files) {
            LabeledImage li;
            li.pixels = resize_bilinear(load_image(file.string()), image_h, image_w);
            li.clean_label = static_cast<int>(label);
            li.id = names[label] + "/" + file.filename().string();
            split.records.push_back(identity_record(li, file.string()));
            split.images.push_back(std::move(li));
        }
    }
    return split;
}

namespace {

// One class := one grating orientation/frequency plus a class-specific blob
// layout. Every class shares the same "up" cues (vertical ramp, top-left
// marker) so rotation prediction stays well-posed on these images.
Image synthesize_image(int k, int num_classes, int h, int w, Rng& rng) {
    Image img(h, w, 1);
    const double base_theta = M_PI * static_cast<double>(k) / num_classes;
    const double theta = base_theta + rng.uniform(-0.06, 0.06);
    const double freq = 3.0 + (k % 3) + rng.uniform(-0.15, 0.15);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double amp = 0.16 + rng.uniform(-0.03, 0.03);
    const double ct = std::cos(theta), st = std::sin(theta);

    const int nblobs = 1 + (k % 3);
    const double ring_angle0 = 2.0 * M_PI * k / num_classes;
    std::vector<double> by(nblobs), bx(nblobs), bs(nblobs);
    for (int b = 0; b < nblobs; ++b) {
        const double ang = ring_angle0 + 2.0 * M_PI * b / std::max(1, nblobs) + rng.uniform(-0.25, 0.25);
        const double rad = 0.28 + rng.uniform(-0.05, 0.05);
        by[b] = 0.5 + rad * std::sin(ang);
        bx[b] = 0.5 + rad * std::cos(ang);
        bs[b] = (0.09 + 0.02 * (k % 2)) * (1.0 + rng.uniform(-0.15, 0.15));
    }

    const double marker_y = 0.12 + rng.uniform(-0.03, 0.03);
    const double marker_x = 0.12 + rng.uniform(-0.03, 0.03);

    for (int y = 0; y < h; ++y) {
        const double fy = (y + 0.5) / h;
        for (int x = 0; x < w; ++x) {
            const double fx = (x + 0.5) / w;
            double val = 0.45;
            val += amp * std::sin(2.0 * M_PI * freq * (fx * ct + fy * st) + phase);
            for (int b = 0; b < nblobs; ++b) {
                const double dy = fy - by[b], dx = fx - bx[b];
                val += 0.30 * std::exp(-(dy * dy + dx * dx) / (2.0 * bs[b] * bs[b]));
            }
            // orientation cues shared by all classes
            val += 0.10 * (0.5 - fy);
            const double my = fy - marker_y, mx = fx - marker_x;
            val += 0.35 * std::exp(-(my * my + mx * mx) / (2.0 * 0.04 * 0.04));
            val += 0.05 * rng.normal();
            img.at(y, x, 0) = static_cast<float>(val);
        }
    }
    clamp01(img);
    return img;
}

} // namespace

DatasetSplit make_synthetic_dataset(int num_classes, int per_class, int image_h, int image_w,
                                    std::uint64_t seed, const std::string& split_name) {
    check(num_classes >= 2, "config", "make_synthetic_dataset needs num_classes >= 2");
    check(per_class >= 1, "config", "make_synthetic_dataset needs per_class >= 1");
    check(image_h >= 8 && image_w >= 8, "config", "synthetic images must be at least 8x8");

    DatasetSplit split;
    split.name = split_name;
    split.num_classes = num_classes;
    split.images.reserve(static_cast<std::size_t>(num_classes) * per_class);

    for (int k = 0; k < num_classes; ++k) {
        for (int i = 0; i < per_class; ++i) {
            LabeledImage li;
            li.clean_label = k;
            li.id = "syn/" + std::to_string(k) + "/" + std::to_string(i);
            Rng rng(derive_seed(seed, "synthetic/" + li.id));
            li.pixels = synthesize_image(k, num_classes, image_h, image_w, rng);
            split.records.push_back(identity_record(li, "synthetic"));
            split.images.push_back(std::move(li));
        }
    }
    return split;
}

DatasetSplit inject_symmetric_noise(const DatasetSplit& split, const NoiseSpec& spec) {
    validate(spec);
    check(spec.num_classes == split.num_classes, "config",
          "NoiseSpec num_classes does not match split (" + std::to_string(spec.num_classes) + " vs " +
              std::to_string(split.num_classes) + ")");
    check(split.name != "test", "config", "refusing to inject label noise into a test split");

    DatasetSplit out = split;
    for (std::size_t i = 0; i < out.size(); ++i) {
        CorruptionRecord& rec = out.records[i];
        rec.clean_label = out.images[i].clean_label;
        Rng rng(derive_seed(spec.seed, "noise/" + rec.id));
        if (rng.uniform() < spec.noise_rate) {
            int wrong = rng.uniform_int(spec.num_classes - 1);
            if (wrong >= rec.clean_label) ++wrong;
            rec.observed_label = wrong;
            rec.is_corrupted = true;
        } else {
            rec.observed_label = rec.clean_label;
            rec.is_corrupted = false;
        }
    }
    return out;
}

std::vector<std::vector<double>> transition_matrix(const NoiseSpec& spec) {
    validate(spec);
    const int k = spec.num_classes;
    const double off = spec.noise_rate / (k - 1);
    std::vector<std::vector<double>> m(k, std::vector<double>(k, off));
    for (int i = 0; i < k; ++i) m[i][i] = 1.0 - spec.noise_rate;
    return m;
}

void save_records_jsonl(const std::string& path, const DatasetSplit& split) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write records file: " + path);
    for (const CorruptionRecord& rec : split.records) {
        nlohmann::ordered_json row;
        row["id"] = rec.id;
        row["clean_label"] = rec.clean_label;
        row["observed_label"] = rec.observed_label;
        row["is_corrupted"] = rec.is_corrupted;
        row["path"] = rec.path;
        out << row.dump() << "\n";
    }
    check(out.good(), "io", "failed writing records file: " + path);
}

std::vector<CorruptionRecord> load_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "io", "cannot read records file: " + path);
    std::vector<CorruptionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
        check(!row.is_discarded(), "io", "malformed JSON line in " + path);
        CorruptionRecord rec;
        rec.id = row.at("id").get<std::string>();
        rec.clean_label = row.at("clean_label").get<int>();
        rec.observed_label = row.at("observed_label").get<int>();
        rec.is_corrupted = row.at("is_corrupted").get<bool>();
        rec.path = row.at("path").get<std::string>();
        check(rec.is_corrupted == (rec.observed_label != rec.clean_label), "io",
              "inconsistent corruption record for id " + rec.id);
        records.push_back(std::move(rec));
    }
    return records;
}

DatasetSplit apply_records(const DatasetSplit& split, const std::vector<CorruptionRecord>& records) {
    check(split.size() == records.size(), "config", "record count does not match split size");
    std::unordered_map<std::string, const CorruptionRecord*> by_id;
    by_id.reserve(records.size());
    for (const CorruptionRecord& rec : records) by_id[rec.id] = &rec;

    DatasetSplit out = split;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto it = by_id.find(out.images[i].id);
        check(it != by_id.end(), "config", "no record for sample id " + out.images[i].id);
        check(it->second->clean_label == out.images[i].clean_label, "config",
              "record clean label mismatch for id " + out.images[i].id);
        out.records[i] = *it->second;
    }
    return out;
}

} // namespace sslnl
