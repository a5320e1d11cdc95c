#include "sslnl/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include <json.hpp>

namespace sslnl::nn {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'L', 'N', 'L', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;

struct RawArray {
    std::vector<std::int64_t> shape;
    std::vector<unsigned char> bytes;
};

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    check(in.good(), "checkpoint", "truncated checkpoint file: " + path);
    return v;
}

void write_string(std::ofstream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in, const std::string& path) {
    const auto len = read_pod<std::uint32_t>(in, path);
    std::string s(len, '\0');
    in.read(s.data(), len);
    check(in.good(), "checkpoint", "truncated checkpoint file: " + path);
    return s;
}

nlohmann::json provenance_to_json(const Provenance& p) {
    return {{"pretext", p.pretext}, {"dataset", p.dataset}, {"epochs", p.epochs},
            {"seed", p.seed},       {"config_hash", p.config_hash}};
}

Provenance provenance_from_json(const nlohmann::json& j) {
    Provenance p;
    p.pretext = j.value("pretext", "none");
    p.dataset = j.value("dataset", "");
    p.epochs = j.value("epochs", 0);
    p.seed = j.value("seed", std::uint64_t{0});
    p.config_hash = j.value("config_hash", "");
    return p;
}

std::map<std::string, RawArray> read_arrays(std::ifstream& in, const std::string& path,
                                            std::uint32_t* scalar_size, Provenance* prov,
                                            nlohmann::json* raw_prov = nullptr) {
    char magic[8];
    in.read(magic, 8);
    check(in.good() && std::memcmp(magic, kMagic, 8) == 0, "checkpoint", "not a checkpoint file: " + path);
    const auto version = read_pod<std::uint32_t>(in, path);
    check(version == kVersion, "checkpoint",
          "checkpoint version " + std::to_string(version) + " unsupported (want " + std::to_string(kVersion) + ")");
    *scalar_size = read_pod<std::uint32_t>(in, path);

    const std::string prov_json = read_string(in, path);
    nlohmann::json pj = nlohmann::json::parse(prov_json, nullptr, false);
    check(!pj.is_discarded(), "checkpoint", "corrupt provenance block in " + path);
    *prov = provenance_from_json(pj);
    if (raw_prov) *raw_prov = pj;

    const auto count = read_pod<std::uint32_t>(in, path);
    std::map<std::string, RawArray> arrays;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = read_string(in, path);
        const auto ndims = read_pod<std::uint32_t>(in, path);
        RawArray arr;
        std::uint64_t total = 1;
        for (std::uint32_t d = 0; d < ndims; ++d) {
            arr.shape.push_back(read_pod<std::int64_t>(in, path));
            total *= static_cast<std::uint64_t>(arr.shape.back());
        }
        arr.bytes.resize(total * *scalar_size);
        in.read(reinterpret_cast<char*>(arr.bytes.data()), static_cast<std::streamsize>(arr.bytes.size()));
        check(in.good(), "checkpoint", "truncated array data in " + path);
        arrays.emplace(name, std::move(arr));
    }
    return arrays;
}

template <typename S>
void write_array(std::ofstream& out, const std::string& name, const std::vector<int>& shape,
                 const std::vector<S>& value) {
    write_string(out, name);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (int d : shape) write_pod<std::int64_t>(out, d);
    out.write(reinterpret_cast<const char*>(value.data()),
              static_cast<std::streamsize>(value.size() * sizeof(S)));
}

std::string shape_str(const std::vector<std::int64_t>& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + ")";
}

} // namespace

template <typename S>
void save_checkpoint(Model<S>& model, const Provenance& prov, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    check(out.good(), "io", "cannot write checkpoint: " + path);

    out.write(kMagic, 8);
    write_pod<std::uint32_t>(out, kVersion);
    write_pod<std::uint32_t>(out, sizeof(S));

    nlohmann::json pj = provenance_to_json(prov);
    pj["head_kind"] = model.head_spec().kind_name();
    pj["feature_dim"] = model.encoder_config().feature_dim;
    pj["preset"] = model.encoder_config().preset;
    write_string(out, pj.dump());

    std::uint32_t count = 0;
    model.visit_params([&](Param<S>&) { ++count; });
    model.visit_buffers([&](Buffer<S>&) { ++count; });
    write_pod<std::uint32_t>(out, count);

    model.visit_params([&](Param<S>& p) { write_array(out, p.name, p.shape, p.value); });
    model.visit_buffers([&](Buffer<S>& b) {
        write_array(out, b.name, {static_cast<int>(b.value.size())}, b.value);
    });
    check(out.good(), "io", "failed writing checkpoint: " + path);
}

template <typename S>
Provenance load_checkpoint(Model<S>& model, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    check(in.good(), "io", "cannot read checkpoint: " + path);

    std::uint32_t scalar_size = 0;
    Provenance prov;
    nlohmann::json raw_prov;
    auto arrays = read_arrays(in, path, &scalar_size, &prov, &raw_prov);
    check(scalar_size == sizeof(S), "checkpoint",
          "scalar width mismatch: file has " + std::to_string(scalar_size * 8) + "-bit, model wants " +
              std::to_string(sizeof(S) * 8) + "-bit");

    // Pass 1: every encoder array must be present with the right shape.
    std::vector<std::string> problems;
    model.visit_encoder_params([&](Param<S>& p) {
        auto it = arrays.find(p.name);
        if (it == arrays.end()) {
            problems.push_back(p.name + ": missing from checkpoint");
            return;
        }
        std::vector<std::int64_t> want(p.shape.begin(), p.shape.end());
        if (it->second.shape != want)
            problems.push_back(p.name + ": shape " + shape_str(it->second.shape) + " vs model " +
                               shape_str(want));
    });
    model.visit_buffers([&](Buffer<S>& b) {
        auto it = arrays.find(b.name);
        if (it == arrays.end())
            problems.push_back(b.name + ": missing from checkpoint");
        else if (it->second.bytes.size() != b.value.size() * sizeof(S))
            problems.push_back(b.name + ": length mismatch");
    });
    if (!problems.empty()) {
        std::string msg = "architecture mismatch loading " + path + ":";
        for (const std::string& p : problems) msg += "\n  " + p;
        fail("checkpoint", msg);
    }

    model.visit_encoder_params([&](Param<S>& p) {
        const RawArray& arr = arrays.at(p.name);
        std::memcpy(p.value.data(), arr.bytes.data(), arr.bytes.size());
    });
    model.visit_buffers([&](Buffer<S>& b) {
        const RawArray& arr = arrays.at(b.name);
        std::memcpy(b.value.data(), arr.bytes.data(), arr.bytes.size());
    });

    // Pass 2: head arrays only when the task kind and all shapes line up; a
    // pretext head never silently lands in a classifier of the same width.
    bool head_matches = raw_prov.value("head_kind", "") == model.head_spec().kind_name();
    model.visit_params([&](Param<S>& p) {
        if (p.name.rfind("head.", 0) != 0) return;
        auto it = arrays.find(p.name);
        std::vector<std::int64_t> want(p.shape.begin(), p.shape.end());
        if (it == arrays.end() || it->second.shape != want) head_matches = false;
    });
    if (head_matches) {
        model.visit_params([&](Param<S>& p) {
            if (p.name.rfind("head.", 0) != 0) return;
            const RawArray& arr = arrays.at(p.name);
            std::memcpy(p.value.data(), arr.bytes.data(), arr.bytes.size());
        });
    }
    return prov;
}

Provenance read_checkpoint_provenance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    check(in.good(), "io", "cannot read checkpoint: " + path);
    std::uint32_t scalar_size = 0;
    Provenance prov;
    read_arrays(in, path, &scalar_size, &prov);
    return prov;
}

template void save_checkpoint<float>(Model<float>&, const Provenance&, const std::string&);
template void save_checkpoint<double>(Model<double>&, const Provenance&, const std::string&);
template Provenance load_checkpoint<float>(Model<float>&, const std::string&);
template Provenance load_checkpoint<double>(Model<double>&, const std::string&);

} // namespace sslnl::nn
