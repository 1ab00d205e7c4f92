#pragma once

#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/types.hpp"

namespace occkit::kernels {

// Pinhole camera. extrinsic maps camera frame -> ego frame; projection uses
// its inverse. Camera convention: +z forward (depth), +x right, +y down.
struct CameraModel {
    double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
    Pose extrinsic;
    int width = 0, height = 0;

    void validate() const;
};

struct Projection {
    double u = 0.0, v = 0.0;
    bool valid = false;
};

// Points are in the ego frame. A projection is valid iff depth > 0 and the
// pixel lands inside [0, width) x [0, height). Invalid points are flagged,
// never faulted.
std::vector<Projection> project_points(const std::vector<Vec3>& points_ego,
                                       const CameraModel& cam);

// n_ref probe points per voxel: at the voxel's (x, y) center, z spread evenly
// with fractions (j + 0.5) / n_ref of the cell height. Points are generated
// on demand; nothing is materialized per voxel.
struct ReferencePointSet {
    GridSpec grid;
    int n_ref = 4;

    Vec3 point(const Index3& voxel, int j) const;
};

ReferencePointSet reference_points(const GridSpec& spec, int n_ref);

}  // namespace occkit::kernels
