#pragma once

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/kernels/feature_volume.hpp"

namespace occkit {

// Re-expresses a grid built in a previous ego frame in the current one.
// relative_pose maps previous-frame coordinates into current-frame
// coordinates; each output cell samples the input at the inverse-transformed
// location. Label grids sample nearest-neighbor, feature volumes trilinear;
// locations outside the source come back free / zero.
VoxelGrid warp_grid(const VoxelGrid& grid, const Pose& relative_pose);

// Feature volumes carry no metric origin, so the pose acts on cell
// coordinates: the translation is in cells and positions are (x, y, z) cell
// centers at integers.
kernels::FeatureVolume warp_grid(const kernels::FeatureVolume& vol,
                                 const Pose& relative_pose);

}  // namespace occkit
