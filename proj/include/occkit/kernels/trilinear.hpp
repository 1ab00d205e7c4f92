#pragma once

#include "occkit/kernels/feature_volume.hpp"
#include "occkit/types.hpp"

namespace occkit::kernels {

// 8-corner trilinear blend at continuous position (z, y, x); coordinates
// outside [0, dim-1] clamp to the border. Corner contributions accumulate in
// fixed z-major order, identical across kernel variants.
void trilinear_sample(const FeatureVolume& vol, const VolPos& p, double* out);

std::vector<double> trilinear_sample(const FeatureVolume& vol, const VolPos& p);

}  // namespace occkit::kernels
