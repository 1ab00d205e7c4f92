#include "occkit/grid.hpp"

namespace occkit {

std::optional<Index3> world_to_voxel(const Vec3& p, const GridSpec& spec) {
    Index3 idx;
    idx.x = int(std::floor((p.x - spec.origin.x) / spec.resolution));
    idx.y = int(std::floor((p.y - spec.origin.y) / spec.resolution));
    idx.z = int(std::floor((p.z - spec.origin.z) / spec.resolution));
    if (!spec.in_bounds(idx)) return std::nullopt;
    return idx;
}

Vec3 voxel_center(const Index3& idx, const GridSpec& spec) {
    if (!spec.in_bounds(idx))
        throw Error("voxel_center: index (" + std::to_string(idx.x) + "," +
                    std::to_string(idx.y) + "," + std::to_string(idx.z) + ") out of range");
    return {spec.origin.x + (idx.x + 0.5) * spec.resolution,
            spec.origin.y + (idx.y + 0.5) * spec.resolution,
            spec.origin.z + (idx.z + 0.5) * spec.resolution};
}

}  // namespace occkit
