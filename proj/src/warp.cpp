#include <cmath>

#include "occkit/kernels/trilinear.hpp"
#include "occkit/warp.hpp"

namespace occkit {

VoxelGrid warp_grid(const VoxelGrid& grid, const Pose& relative_pose) {
    relative_pose.validate();
    const Pose inv = relative_pose.inverse();
    VoxelGrid out(grid.spec);
    if (grid.has_flow()) out.enable_flow();
    if (grid.has_visibility()) out.enable_visibility(1);
    for (int z = 0; z < grid.spec.dims.z; ++z)
        for (int y = 0; y < grid.spec.dims.y; ++y)
            for (int x = 0; x < grid.spec.dims.x; ++x) {
                const Vec3 src = inv.apply(voxel_center({x, y, z}, grid.spec));
                const auto idx = world_to_voxel(src, grid.spec);
                if (!idx) continue;
                const std::size_t si = grid.spec.flat(idx->x, idx->y, idx->z);
                const std::size_t di = grid.spec.flat(x, y, z);
                out.labels[di] = grid.labels[si];
                if (grid.has_flow()) {
                    out.flow[di * 2] = grid.flow[si * 2];
                    out.flow[di * 2 + 1] = grid.flow[si * 2 + 1];
                }
                if (grid.has_visibility()) out.visibility[di] = grid.visibility[si];
            }
    return out;
}

kernels::FeatureVolume warp_grid(const kernels::FeatureVolume& vol,
                                 const Pose& relative_pose) {
    relative_pose.validate();
    const Pose inv = relative_pose.inverse();
    kernels::FeatureVolume out(vol.dim_z, vol.dim_y, vol.dim_x, vol.channels);
    std::vector<double> sample(std::size_t(vol.channels));
    for (int z = 0; z < vol.dim_z; ++z)
        for (int y = 0; y < vol.dim_y; ++y)
            for (int x = 0; x < vol.dim_x; ++x) {
                const Vec3 src = inv.apply({double(x), double(y), double(z)});
                // Outside the sampled span [0, dim-1] per axis means zero,
                // not border clamp.
                if (src.x < 0.0 || src.x > double(vol.dim_x - 1) || src.y < 0.0 ||
                    src.y > double(vol.dim_y - 1) || src.z < 0.0 ||
                    src.z > double(vol.dim_z - 1))
                    continue;
                kernels::trilinear_sample(vol, {src.z, src.y, src.x}, sample.data());
                double* dst = out.cell(z, y, x);
                for (int c = 0; c < vol.channels; ++c) dst[c] = sample[c];
            }
    return out;
}

}  // namespace occkit
