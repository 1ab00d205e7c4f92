#include "occkit/kernels/cascade.hpp"

#include <cmath>
#include <random>
#include <string>

#include "occkit/simd/kernels.hpp"

namespace occkit::kernels {

void CascadeSchedule::validate() const {
    if (steps < 2) throw Error("cascade schedule: need at least 2 steps");
    if (heights.size() != std::size_t(steps) || channels.size() != std::size_t(steps))
        throw Error("cascade schedule: heights/channels must list one entry per step");
    for (int i = 0; i < steps; ++i) {
        if (heights[std::size_t(i)] < 1 || channels[std::size_t(i)] < 1)
            throw Error("cascade schedule: non-positive height or channel count");
        if (i > 0 && heights[std::size_t(i)] <= heights[std::size_t(i) - 1])
            throw Error("cascade schedule: heights must be strictly increasing");
    }
    if (lift_weights.size() != std::size_t(steps - 1) ||
        lift_bias.size() != std::size_t(steps - 1))
        throw Error("cascade schedule: need one lift map per transition");
    for (int i = 0; i + 1 < steps; ++i) {
        if (lift_weights[std::size_t(i)].size() != in_size(i) * out_size(i))
            throw Error("cascade schedule: lift weight " + std::to_string(i) +
                        " has wrong size");
        if (lift_bias[std::size_t(i)].size() != out_size(i))
            throw Error("cascade schedule: lift bias " + std::to_string(i) +
                        " has wrong size");
    }
}

std::size_t CascadeSchedule::in_size(int step) const {
    return std::size_t(heights[std::size_t(step)]) *
           std::size_t(channels[std::size_t(step)]);
}

std::size_t CascadeSchedule::out_size(int step) const {
    return std::size_t(heights[std::size_t(step) + 1]) *
           std::size_t(channels[std::size_t(step) + 1]);
}

CascadeSchedule make_default_schedule(std::uint64_t seed) {
    CascadeSchedule s;
    s.steps = 4;
    s.heights = {2, 4, 8, 16};
    s.channels = {128, 128, 64, 64};
    std::mt19937_64 rng(seed);
    const auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    s.lift_weights.resize(3);
    s.lift_bias.resize(3);
    for (int i = 0; i < 3; ++i) {
        const double scale = 1.0 / std::sqrt(double(s.in_size(i)));
        auto& w = s.lift_weights[std::size_t(i)];
        w.resize(s.in_size(i) * s.out_size(i));
        for (auto& v : w) v = (2.0 * unit() - 1.0) * scale;
        auto& b = s.lift_bias[std::size_t(i)];
        b.resize(s.out_size(i));
        for (auto& v : b) v = (2.0 * unit() - 1.0) * 0.01;
    }
    s.validate();
    return s;
}

FeatureVolume cascade_lift(const FeatureVolume& vol, const CascadeSchedule& sched,
                           int step) {
    sched.validate();
    if (step < 0 || step + 1 >= sched.steps)
        throw Error("cascade_lift: step " + std::to_string(step) + " out of range");
    const int zi = sched.heights[std::size_t(step)];
    const int ci = sched.channels[std::size_t(step)];
    if (vol.dim_z != zi || vol.channels != ci)
        throw Error("cascade_lift: step " + std::to_string(step) + " expects (" +
                    std::to_string(zi) + ", H, W, " + std::to_string(ci) + "), got " +
                    vol.shape_str());
    const int zo = sched.heights[std::size_t(step) + 1];
    const int co = sched.channels[std::size_t(step) + 1];
    const std::size_t n_in = sched.in_size(step);
    const std::size_t n_out = sched.out_size(step);
    const double* w = sched.lift_weights[std::size_t(step)].data();
    const double* b = sched.lift_bias[std::size_t(step)].data();

    FeatureVolume out(zo, vol.dim_y, vol.dim_x, co);
    std::vector<double> col_in(n_in), col_out(n_out);
    const auto& kt = simd::active();
    for (int y = 0; y < vol.dim_y; ++y)
        for (int x = 0; x < vol.dim_x; ++x) {
            // Gather the column z-major, channel fastest — the flattening the
            // lift matrix is defined over.
            double* dst = col_in.data();
            for (int z = 0; z < zi; ++z, dst += ci) {
                const double* src = vol.cell(z, y, x);
                std::copy(src, src + ci, dst);
            }
            kt.matvec(w, b, col_in.data(), col_out.data(), n_out, n_in);
            const double* src = col_out.data();
            for (int z = 0; z < zo; ++z, src += co)
                std::copy(src, src + co, out.cell(z, y, x));
        }
    return out;
}

FeatureVolume cascade_run(const FeatureVolume& vol, const CascadeSchedule& sched) {
    sched.validate();
    FeatureVolume cur = vol;
    for (int i = 0; i + 1 < sched.steps; ++i) cur = cascade_lift(cur, sched, i);
    return cur;
}

}  // namespace occkit::kernels
