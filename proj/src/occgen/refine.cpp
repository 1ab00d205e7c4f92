#include <algorithm>
#include <array>
#include <cstring>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

std::size_t densify_from_unlabeled(VoxelGrid& grid, const PointCloud& unlabeled,
                                   int radius, int min_neighbors) {
    if (radius < 1) throw Error("densify: radius must be >= 1");
    if (min_neighbors < 1) throw Error("densify: min_neighbors must be >= 1");
    const GridSpec& spec = grid.spec;

    std::vector<std::uint8_t> has_point(spec.voxel_count(), 0);
    for (const auto& p : unlabeled.points) {
        const auto idx = world_to_voxel(p, spec);
        if (idx) has_point[spec.flat(idx->x, idx->y, idx->z)] = 1;
    }

    const std::vector<Label> before = grid.labels;
    std::size_t changed = 0;
    for (int z = 0; z < spec.dims.z; ++z)
        for (int y = 0; y < spec.dims.y; ++y)
            for (int x = 0; x < spec.dims.x; ++x) {
                const std::size_t fi = spec.flat(x, y, z);
                if (before[fi] != kFree || !has_point[fi]) continue;
                std::array<int, kNumClasses + 1> count{};
                int labeled = 0;
                for (int dz = -radius; dz <= radius; ++dz)
                    for (int dy = -radius; dy <= radius; ++dy)
                        for (int dx = -radius; dx <= radius; ++dx) {
                            if (dx == 0 && dy == 0 && dz == 0) continue;
                            const Index3 n{x + dx, y + dy, z + dz};
                            if (!spec.in_bounds(n)) continue;
                            const Label l = before[spec.flat(n.x, n.y, n.z)];
                            if (l == kFree) continue;
                            ++count[l];
                            ++labeled;
                        }
                if (labeled < min_neighbors) continue;
                Label best = kFree;
                int best_n = 0;
                for (Label l = 1; l <= kNumClasses; ++l)
                    if (count[l] > best_n) {
                        best_n = count[l];
                        best = l;
                    }
                grid.labels[fi] = best;
                ++changed;
            }
    return changed;
}

std::size_t fill_holes(VoxelGrid& grid, const std::vector<Label>& classes,
                       int min_neighbors) {
    if (min_neighbors < 1 || min_neighbors > 8)
        throw Error("fill_holes: min_neighbors must be in [1, 8]");
    for (Label l : classes)
        if (!is_semantic(l)) throw Error("fill_holes: non-semantic class given");
    const GridSpec& spec = grid.spec;
    std::array<bool, kNumClasses + 1> eligible{};
    for (Label l : classes) eligible[l] = true;

    const std::vector<Label> before = grid.labels;
    std::size_t changed = 0;
    for (int z = 0; z < spec.dims.z; ++z)
        for (int y = 0; y < spec.dims.y; ++y)
            for (int x = 0; x < spec.dims.x; ++x) {
                const std::size_t fi = spec.flat(x, y, z);
                if (before[fi] != kFree) continue;
                std::array<int, kNumClasses + 1> count{};
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const Index3 n{x + dx, y + dy, z};
                        if (!spec.in_bounds(n)) continue;
                        const Label l = before[spec.flat(n.x, n.y, n.z)];
                        if (l != kFree && eligible[l]) ++count[l];
                    }
                Label best = kFree;
                int best_n = 0;
                for (Label l = 1; l <= kNumClasses; ++l)
                    if (eligible[l] && count[l] >= min_neighbors && count[l] > best_n) {
                        best_n = count[l];
                        best = l;
                    }
                if (best == kFree) continue;
                grid.labels[fi] = best;
                ++changed;
            }
    return changed;
}

}  // namespace occkit::occgen
