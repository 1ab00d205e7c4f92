#pragma once

#include <cstdint>
#include <vector>

#include "occkit/kernels/feature_volume.hpp"
#include "occkit/types.hpp"

namespace occkit::kernels {

// Progressive height lifting: step i maps a (Z_i, H, W, C_i) volume to
// (Z_{i+1}, H, W, C_{i+1}) by an affine transform applied independently to
// each (y, x) column, flattened z-major then channel.
struct CascadeSchedule {
    int steps = 0;              // N
    std::vector<int> heights;   // Z_i, strictly increasing
    std::vector<int> channels;  // C_i

    // lift_weights[i]: (Z_{i+1}*C_{i+1}) x (Z_i*C_i), column-major; one per
    // transition, so steps-1 entries.
    std::vector<std::vector<double>> lift_weights;
    std::vector<std::vector<double>> lift_bias;

    void validate() const;
    std::size_t in_size(int step) const;   // Z_i * C_i
    std::size_t out_size(int step) const;  // Z_{i+1} * C_{i+1}
};

// N=4, Z=(2,4,8,16), C=(128,128,64,64), weights seeded and scaled so repeated
// lifting stays well-conditioned.
CascadeSchedule make_default_schedule(std::uint64_t seed);

// One lifting step; vol must match the step's input shape.
FeatureVolume cascade_lift(const FeatureVolume& vol, const CascadeSchedule& sched,
                           int step);

// All steps in order; the default schedule ends at (16, H, W, 64).
FeatureVolume cascade_run(const FeatureVolume& vol, const CascadeSchedule& sched);

}  // namespace occkit::kernels
