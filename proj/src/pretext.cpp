#include "sslnl/pretext.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "sslnl/rng.hpp"

namespace sslnl {

int hamming_distance(const std::vector<int>& a, const std::vector<int>& b) {
    check(a.size() == b.size(), "shape", "hamming_distance on unequal lengths");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
    return d;
}

namespace {

double factorial_capped(int g, double cap) {
    double f = 1.0;
    for (int i = 2; i <= g; ++i) {
        f *= i;
        if (f > cap) return f;
    }
    return f;
}

std::vector<int> random_permutation(int g, Rng& rng) {
    std::vector<int> p(g);
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(p);
    return p;
}

std::vector<std::vector<int>> all_permutations(int g) {
    std::vector<int> p(g);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

int min_pairwise_hamming(const std::vector<std::vector<int>>& perms) {
    int best = static_cast<int>(perms.empty() ? 0 : perms[0].size());
    for (std::size_t i = 0; i < perms.size(); ++i)
        for (std::size_t j = i + 1; j < perms.size(); ++j)
            best = std::min(best, hamming_distance(perms[i], perms[j]));
    return perms.size() < 2 ? 0 : best;
}

} // namespace

PermutationSet generate_permutation_set(int grid_cells, int count, std::uint64_t seed) {
    check(grid_cells >= 2, "config", "grid_cells must be >= 2");
    check(count >= 1, "config", "permutation count must be >= 1");
    const double total = factorial_capped(grid_cells, 1e18);
    check(static_cast<double>(count) <= total, "config",
          "requested more permutations than " + std::to_string(grid_cells) + "! allows");

    Rng rng(derive_seed(seed, "permutation-set"));
    const std::size_t pool_target = std::max<std::size_t>(10 * static_cast<std::size_t>(count), 2000);

    std::vector<std::vector<int>> pool;
    if (total <= static_cast<double>(pool_target)) {
        pool = all_permutations(grid_cells);
    } else {
        std::set<std::vector<int>> seen;
        while (seen.size() < pool_target) seen.insert(random_permutation(grid_cells, rng));
        pool.assign(seen.begin(), seen.end());
        // seeded order, not lexicographic: shuffle so ties don't favor small perms
        rng.shuffle(pool);
    }

    PermutationSet set;
    set.grid_cells = grid_cells;
    set.perms.reserve(count);

    std::vector<int> start = random_permutation(grid_cells, rng);
    set.perms.push_back(start);

    std::vector<int> min_dist(pool.size());
    std::vector<char> used(pool.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        min_dist[i] = hamming_distance(pool[i], start);
        if (pool[i] == start) used[i] = 1;
    }

    while (set.size() < count) {
        int best_idx = -1;
        int best_dist = -1;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i] || min_dist[i] == 0) continue; // duplicates of chosen perms excluded
            if (min_dist[i] > best_dist) {
                best_dist = min_dist[i];
                best_idx = static_cast<int>(i);
            }
        }
        check(best_idx >= 0, "config", "candidate pool exhausted before reaching requested count");
        used[best_idx] = 1;
        set.perms.push_back(pool[best_idx]);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            min_dist[i] = std::min(min_dist[i], hamming_distance(pool[i], pool[best_idx]));
        }
    }

    set.min_hamming = min_pairwise_hamming(set.perms);
    return set;
}

void save_permutation_set(const std::string& path, const PermutationSet& set, std::uint64_t seed) {
    std::ofstream out(path);
    check(out.good(), "io", "cannot write permutation set: " + path);
    out << set.grid_cells << " " << set.size() << " " << seed << "\n";
    for (const auto& perm : set.perms) {
        for (std::size_t i = 0; i < perm.size(); ++i) out << (i ? " " : "") << perm[i];
        out << "\n";
    }
    check(out.good(), "io", "failed writing permutation set: " + path);
}

PermutationSet load_permutation_set(const std::string& path) {
    std::ifstream in(path);
    check(in.good(), "io", "cannot read permutation set: " + path);
    int g = 0, p = 0;
    std::uint64_t seed = 0;
    in >> g >> p >> seed;
    check(in.good() && g >= 2 && p >= 1, "io", "malformed permutation set header: " + path);

    PermutationSet set;
    set.grid_cells = g;
    set.perms.assign(p, std::vector<int>(g));
    for (int i = 0; i < p; ++i) {
        std::vector<char> hit(g, 0);
        for (int j = 0; j < g; ++j) {
            in >> set.perms[i][j];
            check(!in.fail(), "io", "truncated permutation set: " + path);
            check(set.perms[i][j] >= 0 && set.perms[i][j] < g && !hit[set.perms[i][j]], "io",
                  "line " + std::to_string(i + 2) + " is not a permutation in " + path);
            hit[set.perms[i][j]] = 1;
        }
    }
    set.min_hamming = min_pairwise_hamming(set.perms);
    return set;
}

PretextSample make_rotation_sample(const Image& img, const AugmentationPipeline& pipeline,
                                   std::uint64_t seed) {
    Rng rng(derive_seed(seed, "rotation-sample"));
    Image aug = pipeline.apply(img, rng);
    check(aug.h == aug.w, "shape", "rotation pretext needs a square image after the pipeline");
    PretextSample sample;
    sample.target = rng.uniform_int(4);
    sample.inputs.push_back(rot90(aug, sample.target));
    return sample;
}

namespace {

std::vector<Image> grid_patches_3x3(const Image& img, int patch_size) {
    const int cell_h = img.h / 3;
    const int cell_w = img.w / 3;
    check(cell_h >= 1 && cell_w >= 1, "shape", "image too small for a 3x3 patch grid");
    std::vector<Image> patches;
    patches.reserve(9);
    for (int gy = 0; gy < 3; ++gy)
        for (int gx = 0; gx < 3; ++gx) {
            Image patch = crop(img, gy * cell_h, gx * cell_w, cell_h, cell_w);
            patch = resize_bilinear(patch, patch_size, patch_size);
            standardize(patch);
            patches.push_back(std::move(patch));
        }
    return patches;
}

PretextSample ordered_by_permutation(std::vector<Image> patches, const PermutationSet& perms, Rng& rng) {
    PretextSample sample;
    sample.target = rng.uniform_int(perms.size());
    const std::vector<int>& perm = perms.perms[sample.target];
    sample.inputs.resize(patches.size());
    for (std::size_t j = 0; j < patches.size(); ++j) sample.inputs[j] = std::move(patches[perm[j]]);
    return sample;
}

} // namespace

PretextSample make_jigsaw_sample(const Image& img, const AugmentationPipeline& pipeline,
                                 const PermutationSet& perms, std::uint64_t seed, int patch_size) {
    check(perms.grid_cells == 9, "config", "jigsaw needs a 9-cell permutation set");
    check(patch_size >= 2, "config", "patch_size must be >= 2");
    Rng rng(derive_seed(seed, "jigsaw-sample"));
    Image aug = pipeline.apply(img, rng);
    return ordered_by_permutation(grid_patches_3x3(aug, patch_size), perms, rng);
}

std::vector<double> default_jigmag_factors() {
    return {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
}

PretextSample make_jigmag_sample(const Image& img, const AugmentationPipeline& pipeline,
                                 const PermutationSet& perms, const std::vector<double>& factors,
                                 std::uint64_t seed, int patch_size) {
    check(perms.grid_cells == 9, "config", "jigmag needs a 9-cell permutation set");
    check(factors.size() == 9, "config", "jigmag needs exactly 9 magnification factors");
    for (double f : factors) check(f >= 1.0 && f <= 5.0, "config", "magnification factors must lie in [1,5]");
    check(patch_size >= 2, "config", "patch_size must be >= 2");

    Rng rng(derive_seed(seed, "jigmag-sample"));
    Image aug = pipeline.apply(img, rng);
    const int side = std::min(aug.h, aug.w);

    std::vector<Image> patches;
    patches.reserve(9);
    for (double f : factors) {
        const int win = static_cast<int>(side / f);
        check(win >= 2, "shape", "magnified crop window smaller than 2 pixels");
        const int y0 = rng.uniform_int(aug.h - win + 1);
        const int x0 = rng.uniform_int(aug.w - win + 1);
        Image patch = crop(aug, y0, x0, win, win);
        patch = resize_bilinear(patch, patch_size, patch_size);
        standardize(patch);
        patches.push_back(std::move(patch));
    }
    return ordered_by_permutation(std::move(patches), perms, rng);
}

PretextSample make_contrastive_pair(const Image& img, const AugmentationPipeline& pipeline,
                                    std::uint64_t seed) {
    PretextSample sample;
    sample.inputs.push_back(pipeline.apply(img, derive_seed(seed, "contrastive-view-a")));
    sample.inputs.push_back(pipeline.apply(img, derive_seed(seed, "contrastive-view-b")));
    sample.target = -1;
    return sample;
}

} // namespace sslnl
