#include "occkit/kernels/camera.hpp"

#include <cmath>
#include <string>

namespace occkit::kernels {

void CameraModel::validate() const {
    if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
          std::isfinite(cy)))
        throw Error("camera: non-finite intrinsics");
    if (fx == 0.0 || fy == 0.0) throw Error("camera: zero focal length");
    if (width < 1 || height < 1) throw Error("camera: image size must be positive");
    extrinsic.validate();
}

std::vector<Projection> project_points(const std::vector<Vec3>& points_ego,
                                       const CameraModel& cam) {
    cam.validate();
    const Pose ego_to_cam = cam.extrinsic.inverse();
    std::vector<Projection> out(points_ego.size());
    for (std::size_t i = 0; i < points_ego.size(); ++i) {
        const Vec3 pc = ego_to_cam.apply(points_ego[i]);
        Projection& pr = out[i];
        if (!(pc.z > 0.0)) continue;
        pr.u = cam.fx * pc.x / pc.z + cam.cx;
        pr.v = cam.fy * pc.y / pc.z + cam.cy;
        pr.valid = pr.u >= 0.0 && pr.u < double(cam.width) && pr.v >= 0.0 &&
                   pr.v < double(cam.height);
    }
    return out;
}

Vec3 ReferencePointSet::point(const Index3& voxel, int j) const {
    if (j < 0 || j >= n_ref)
        throw Error("reference point index " + std::to_string(j) + " out of range");
    if (!grid.in_bounds(voxel)) throw Error("reference point voxel out of bounds");
    const Vec3 c = voxel_center(voxel, grid);
    const double frac = (double(j) + 0.5) / double(n_ref);
    const double z = grid.origin.z + (double(voxel.z) + frac) * grid.resolution;
    return {c.x, c.y, z};
}

ReferencePointSet reference_points(const GridSpec& spec, int n_ref) {
    if (n_ref < 1) throw Error("reference_points: n_ref must be >= 1");
    spec.validate();
    ReferencePointSet r;
    r.grid = spec;
    r.n_ref = n_ref;
    return r;
}

}  // namespace occkit::kernels
