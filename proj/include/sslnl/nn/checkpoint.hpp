#pragma once

#include <cstdint>
#include <string>

#include "sslnl/nn/model.hpp"

namespace sslnl::nn {

struct Provenance {
    std::string pretext = "none"; // "none" | "rotation" | "jigsaw" | "jigmag" | "contrastive"
    std::string dataset;
    int epochs = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

// Versioned binary container: named parameter/buffer arrays plus a JSON
// provenance block. Save -> load reproduces every array bit-exactly.
template <typename S>
void save_checkpoint(Model<S>& model, const Provenance& prov, const std::string& path);

// Restores every encoder array (all must match by name and shape, otherwise
// an error names the offending array). Head arrays load only when the stored
// head matches this model's head; a pretext head over a classifier model is
// skipped and the freshly initialized head stays.
template <typename S>
Provenance load_checkpoint(Model<S>& model, const std::string& path);

// Provenance without touching any model (inspection / CLI `report`).
Provenance read_checkpoint_provenance(const std::string& path);

extern template void save_checkpoint<float>(Model<float>&, const Provenance&, const std::string&);
extern template void save_checkpoint<double>(Model<double>&, const Provenance&, const std::string&);
extern template Provenance load_checkpoint<float>(Model<float>&, const std::string&);
extern template Provenance load_checkpoint<double>(Model<double>&, const std::string&);

} // namespace sslnl::nn
