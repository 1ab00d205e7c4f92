#pragma once

#include <cstdint>
#include <vector>

#include "occkit/kernels/feature_volume.hpp"
#include "occkit/types.hpp"

namespace occkit::kernels {

// Multi-head deformable attention over a feature volume. Offsets and
// attention weights are inputs, not learned: the kernel verifies the sampling
// and projection math only.
//
// Output for one query at reference position p:
//   sum_m W_m * ( sum_k A_mk * (V_k * sample(vol, p + dp_mk)) )
// where V_k is the per-point value projection (C -> C/M, shared across heads)
// and W_m the per-head output projection (C/M -> C).
struct DeformAttnParams {
    int heads = 0;     // M; must divide channels
    int points = 0;    // K sampling points per head
    int channels = 0;  // C

    // value_proj[k]: (C/M) x C, column-major.
    std::vector<std::vector<double>> value_proj;
    // output_proj[m]: C x (C/M), column-major.
    std::vector<std::vector<double>> output_proj;

    // Per query, head-major then point: attention_weights[(q*M + m)*K + k].
    // Each (query, head) group of K weights sums to 1 within 1e-6.
    std::vector<double> attention_weights;
    // Sampling offsets in cell units, same ordering as attention_weights.
    std::vector<VolPos> offsets;

    int head_dim() const { return heads > 0 ? channels / heads : 0; }
    std::size_t query_count() const;

    // Shape and finiteness checks; weight sums are checked per query at
    // compute time so faults can name the offending head.
    void validate() const;
};

// Random parameters with weight groups normalized to sum 1. Deterministic for
// a fixed seed.
DeformAttnParams make_random_attn_params(int heads, int points, int channels,
                                         std::size_t queries, std::uint64_t seed);

// Single query. params must hold exactly one query's weights and offsets. The
// query feature vector is accepted for interface fidelity but does not enter
// the arithmetic: weights and offsets already encode its effect.
std::vector<double> deformable_attention_3d(const std::vector<double>& query,
                                            const VolPos& p, const FeatureVolume& vol,
                                            const DeformAttnParams& params);

// Element-wise attention over many queries; output order matches input order.
// Faults carry the query index.
std::vector<std::vector<double>> batched_attention(
    const std::vector<std::vector<double>>& queries, const std::vector<VolPos>& positions,
    const FeatureVolume& vol, const DeformAttnParams& params);

}  // namespace occkit::kernels
