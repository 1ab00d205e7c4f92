#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occkit/kernels/cascade.hpp"
#include "occkit/kernels/deform_attn.hpp"
#include "occkit/kernels/feature_volume.hpp"

namespace occkit::kernels {

// Naive reference implementations, written as plain dense loops with their
// own interpolation and matrix arithmetic. They share no code path with the
// production kernels so the two can check each other.
namespace oracle {

std::vector<double> trilinear(const FeatureVolume& vol, const VolPos& p);

std::vector<double> attention(const VolPos& p, const FeatureVolume& vol,
                              const DeformAttnParams& params, std::size_t query_index);

FeatureVolume cascade(const FeatureVolume& vol, const CascadeSchedule& sched, int step);

}  // namespace oracle

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Production trilinear against analytically known affine fields.
CheckResult check_trilinear_affine(std::uint64_t seed, int fields, int points_per_field,
                                   double tol);
// Random attention instances against the naive oracle (relative tolerance).
CheckResult check_attention_oracle(std::uint64_t seed, int instances, double rel_tol);
// Shape chain of the default cascade schedule for each H=W size given.
CheckResult check_cascade_shapes(const std::vector<int>& hw_sizes);
// Random cascade steps against the per-column matrix-product oracle.
CheckResult check_cascade_oracle(std::uint64_t seed, int instances, double tol);
// Analytic loss gradients against central finite differences.
CheckResult check_grad_focal(std::uint64_t seed, int points, double step, double tol);
CheckResult check_grad_l1(std::uint64_t seed, int points, double step, double tol);
// Structural properties: linearity in the feature volume, and invariance to
// attention weights when every sampling point and value projection coincide.
CheckResult check_attention_linearity(std::uint64_t seed);
CheckResult check_offset_collapse(std::uint64_t seed);

struct SelftestReport {
    std::vector<CheckResult> items;
    bool all_pass() const;
};

// Full kernel verification suite at CLI scale.
SelftestReport run_selftest(std::uint64_t seed);

}  // namespace occkit::kernels
