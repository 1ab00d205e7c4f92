#include "occkit/kernels/deform_attn.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "occkit/kernels/trilinear.hpp"
#include "occkit/simd/kernels.hpp"

namespace occkit::kernels {

std::size_t DeformAttnParams::query_count() const {
    const std::size_t group = std::size_t(heads) * std::size_t(points);
    return group == 0 ? 0 : attention_weights.size() / group;
}

void DeformAttnParams::validate() const {
    if (heads <= 0 || points <= 0 || channels <= 0)
        throw Error("attention params: heads, points, channels must be positive");
    if (channels % heads != 0)
        throw Error("attention params: heads (" + std::to_string(heads) +
                    ") must divide channels (" + std::to_string(channels) + ")");
    const std::size_t cm = std::size_t(channels) / std::size_t(heads);
    if (value_proj.size() != std::size_t(points))
        throw Error("attention params: expected " + std::to_string(points) +
                    " value projections, got " + std::to_string(value_proj.size()));
    for (const auto& w : value_proj)
        if (w.size() != cm * std::size_t(channels))
            throw Error("attention params: value projection must be (C/M) x C");
    if (output_proj.size() != std::size_t(heads))
        throw Error("attention params: expected " + std::to_string(heads) +
                    " output projections, got " + std::to_string(output_proj.size()));
    for (const auto& w : output_proj)
        if (w.size() != std::size_t(channels) * cm)
            throw Error("attention params: output projection must be C x (C/M)");
    const std::size_t group = std::size_t(heads) * std::size_t(points);
    if (attention_weights.empty() || attention_weights.size() % group != 0)
        throw Error("attention params: weight count must be a positive multiple of M*K");
    if (offsets.size() != attention_weights.size())
        throw Error("attention params: offsets and weights must pair up");
    for (double w : attention_weights)
        if (!std::isfinite(w)) throw Error("attention params: non-finite weight");
    for (const auto& o : offsets)
        if (!o.finite()) throw Error("attention params: non-finite offset");
}

namespace {

double unit_double(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

double sym_double(std::mt19937_64& rng, double scale) {
    return (2.0 * unit_double(rng) - 1.0) * scale;
}

void check_weight_sums(const DeformAttnParams& p, std::size_t q) {
    const std::size_t base = q * std::size_t(p.heads) * std::size_t(p.points);
    for (int m = 0; m < p.heads; ++m) {
        double s = 0.0;
        for (int k = 0; k < p.points; ++k)
            s += p.attention_weights[base + std::size_t(m) * p.points + k];
        if (std::fabs(s - 1.0) > 1e-6)
            throw Error("attention weights for head " + std::to_string(m) +
                        " sum to " + std::to_string(s) + ", expected 1");
    }
}

// Shared workspace so the batched path reuses buffers across queries.
struct AttnScratch {
    std::vector<double> sampled;   // C
    std::vector<double> value;     // C/M
    std::vector<double> head_acc;  // C/M
    std::vector<double> head_out;  // C
};

void attend_one(const VolPos& pos, const FeatureVolume& vol, const DeformAttnParams& p,
                std::size_t q, AttnScratch& ws, double* out) {
    check_weight_sums(p, q);
    const std::size_t c = std::size_t(p.channels);
    const std::size_t cm = c / std::size_t(p.heads);
    ws.sampled.resize(c);
    ws.value.resize(cm);
    ws.head_acc.resize(cm);
    ws.head_out.resize(c);

    const auto& kt = simd::active();
    const std::size_t base = q * std::size_t(p.heads) * std::size_t(p.points);
    std::memset(out, 0, c * sizeof(double));
    for (int m = 0; m < p.heads; ++m) {
        std::memset(ws.head_acc.data(), 0, cm * sizeof(double));
        for (int k = 0; k < p.points; ++k) {
            const std::size_t idx = base + std::size_t(m) * p.points + k;
            trilinear_sample(vol, pos + p.offsets[idx], ws.sampled.data());
            kt.matvec(p.value_proj[std::size_t(k)].data(), nullptr, ws.sampled.data(),
                      ws.value.data(), cm, c);
            kt.axpy(p.attention_weights[idx], ws.value.data(), ws.head_acc.data(), cm);
        }
        kt.matvec(p.output_proj[std::size_t(m)].data(), nullptr, ws.head_acc.data(),
                  ws.head_out.data(), c, cm);
        kt.axpy(1.0, ws.head_out.data(), out, c);
    }
}

}  // namespace

DeformAttnParams make_random_attn_params(int heads, int points, int channels,
                                         std::size_t queries, std::uint64_t seed) {
    if (heads <= 0 || points <= 0 || channels <= 0 || channels % heads != 0)
        throw Error("make_random_attn_params: bad shape request");
    DeformAttnParams p;
    p.heads = heads;
    p.points = points;
    p.channels = channels;
    std::mt19937_64 rng(seed);
    const std::size_t cm = std::size_t(channels) / std::size_t(heads);
    const double vscale = 1.0 / std::sqrt(double(channels));
    const double oscale = 1.0 / std::sqrt(double(cm));
    p.value_proj.resize(std::size_t(points));
    for (auto& w : p.value_proj) {
        w.resize(cm * std::size_t(channels));
        for (auto& v : w) v = sym_double(rng, vscale);
    }
    p.output_proj.resize(std::size_t(heads));
    for (auto& w : p.output_proj) {
        w.resize(std::size_t(channels) * cm);
        for (auto& v : w) v = sym_double(rng, oscale);
    }
    const std::size_t n = queries * std::size_t(heads) * std::size_t(points);
    p.attention_weights.resize(n);
    p.offsets.resize(n);
    for (std::size_t q = 0; q < queries; ++q)
        for (int m = 0; m < heads; ++m) {
            const std::size_t base =
                (q * std::size_t(heads) + std::size_t(m)) * std::size_t(points);
            double sum = 0.0;
            for (int k = 0; k < points; ++k) {
                const double w = 0.05 + unit_double(rng);
                p.attention_weights[base + k] = w;
                sum += w;
            }
            for (int k = 0; k < points; ++k) p.attention_weights[base + k] /= sum;
            for (int k = 0; k < points; ++k)
                p.offsets[base + k] = {sym_double(rng, 2.0), sym_double(rng, 2.0),
                                       sym_double(rng, 2.0)};
        }
    p.validate();
    return p;
}

std::vector<double> deformable_attention_3d(const std::vector<double>& query,
                                            const VolPos& p, const FeatureVolume& vol,
                                            const DeformAttnParams& params) {
    params.validate();
    if (params.channels != vol.channels)
        throw Error("deformable_attention_3d: params expect " +
                    std::to_string(params.channels) + " channels, volume has " +
                    std::to_string(vol.channels));
    if (!query.empty() && query.size() != std::size_t(params.channels))
        throw Error("deformable_attention_3d: query length mismatch");
    if (params.query_count() != 1)
        throw Error("deformable_attention_3d: params hold " +
                    std::to_string(params.query_count()) +
                    " queries, expected exactly 1");
    std::vector<double> out(std::size_t(params.channels));
    AttnScratch ws;
    attend_one(p, vol, params, 0, ws, out.data());
    return out;
}

std::vector<std::vector<double>> batched_attention(
    const std::vector<std::vector<double>>& queries, const std::vector<VolPos>& positions,
    const FeatureVolume& vol, const DeformAttnParams& params) {
    params.validate();
    if (queries.size() != positions.size())
        throw Error("batched_attention: " + std::to_string(queries.size()) +
                    " queries vs " + std::to_string(positions.size()) + " positions");
    if (params.channels != vol.channels)
        throw Error("batched_attention: params expect " + std::to_string(params.channels) +
                    " channels, volume has " + std::to_string(vol.channels));
    if (params.query_count() != queries.size())
        throw Error("batched_attention: params hold " +
                    std::to_string(params.query_count()) + " queries, got " +
                    std::to_string(queries.size()));
    std::vector<std::vector<double>> out(queries.size());
    AttnScratch ws;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        if (!queries[q].empty() && queries[q].size() != std::size_t(params.channels))
            throw Error("batched_attention: query " + std::to_string(q) +
                        ": length mismatch");
        out[q].resize(std::size_t(params.channels));
        try {
            attend_one(positions[q], vol, params, q, ws, out[q].data());
        } catch (const Error& e) {
            throw Error("batched_attention: query " + std::to_string(q) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace occkit::kernels
