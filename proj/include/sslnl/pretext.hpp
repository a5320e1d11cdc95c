#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sslnl/augment.hpp"
#include "sslnl/dataset.hpp"
#include "sslnl/image.hpp"

namespace sslnl {

// Fixed set of patch orderings shared by the jigsaw and jigmag tasks.
struct PermutationSet {
    int grid_cells = 9;
    std::vector<std::vector<int>> perms; // each a bijection on {0..grid_cells-1}
    int min_hamming = 0;                 // min pairwise Hamming distance, cached

    int size() const { return static_cast<int>(perms.size()); }
};

// Greedy max-min-Hamming selection from a seeded candidate pool of at least
// 10*P random permutations (all g! of them when that is smaller). Start is a
// seeded random permutation; each step takes the pool entry with the largest
// min distance to the already-chosen set, ties to the lowest pool index.
PermutationSet generate_permutation_set(int grid_cells, int count, std::uint64_t seed);

int hamming_distance(const std::vector<int>& a, const std::vector<int>& b);

// Text format: first line "g P seed", then one permutation per line as
// space-separated indices.
void save_permutation_set(const std::string& path, const PermutationSet& set, std::uint64_t seed);
PermutationSet load_permutation_set(const std::string& path);

struct PretextSample {
    std::vector<Image> inputs; // 1 image (rotation), g patches (puzzles), 2 views (contrastive)
    int target = -1;           // rotation: 0..3; puzzles: permutation index; contrastive: -1
};

// Strong augment, then rotate by k*90 degrees with k drawn from the seed.
PretextSample make_rotation_sample(const Image& img, const AugmentationPipeline& pipeline,
                                   std::uint64_t seed);

// Strong augment -> 3x3 grid -> per-patch resize to patch_size and per-patch
// standardization -> patches reordered by a seeded permutation index.
// Output slot j holds grid cell perm[j].
PretextSample make_jigsaw_sample(const Image& img, const AugmentationPipeline& pipeline,
                                 const PermutationSet& perms, std::uint64_t seed,
                                 int patch_size = 64);

// Evenly spaced magnification factors over [1,5].
std::vector<double> default_jigmag_factors();

// Strong augment -> for each factor f crop a seeded random window of side
// floor(side/f), resize to patch_size, standardize -> reorder by permutation.
PretextSample make_jigmag_sample(const Image& img, const AugmentationPipeline& pipeline,
                                 const PermutationSet& perms, const std::vector<double>& factors,
                                 std::uint64_t seed, int patch_size = 64);

// Two independent stochastic applications of the contrastive pipeline.
PretextSample make_contrastive_pair(const Image& img, const AugmentationPipeline& pipeline,
                                    std::uint64_t seed);

} // namespace sslnl
