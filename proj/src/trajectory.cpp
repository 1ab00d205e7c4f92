#include "occkit/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occkit/geometry.hpp"

namespace occkit {

void Trajectory::validate() const {
    if (samples.empty()) throw Error("trajectory: no samples");
    if (samples.front().t != 0.0) throw Error("trajectory: must start at t = 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.y) ||
            !std::isfinite(s.heading) || !std::isfinite(s.speed))
            throw Error("trajectory: non-finite sample " + std::to_string(i));
        if (i > 0 && s.t <= samples[i - 1].t)
            throw Error("trajectory: time not increasing at sample " + std::to_string(i));
    }
}

double Trajectory::end_time() const {
    return samples.empty() ? 0.0 : samples.back().t;
}

const TrajectorySample& Trajectory::endpoint() const {
    if (samples.empty()) throw Error("trajectory: no samples");
    return samples.back();
}

TrajectorySample Trajectory::interpolate(double t) const {
    validate();
    if (t < 0.0 || t > end_time())
        throw Error("trajectory: time " + std::to_string(t) +
                    " outside [0, " + std::to_string(end_time()) + "]");
    const auto it = std::lower_bound(
        samples.begin(), samples.end(), t,
        [](const TrajectorySample& s, double v) { return s.t < v; });
    if (it->t == t) return *it;
    const TrajectorySample& hi = *it;
    const TrajectorySample& lo = *std::prev(it);
    const double u = (t - lo.t) / (hi.t - lo.t);
    TrajectorySample out;
    out.t = t;
    out.x = lo.x + u * (hi.x - lo.x);
    out.y = lo.y + u * (hi.y - lo.y);
    out.speed = lo.speed + u * (hi.speed - lo.speed);
    out.heading = wrap_angle(lo.heading + u * wrap_angle(hi.heading - lo.heading));
    return out;
}

void Footprint::validate() const {
    if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) ||
        !std::isfinite(width))
        throw Error("footprint: length and width must be positive");
}

int footprint_overlap(const BevGrid& bev, double x, double y, double heading,
                      const Footprint& fp) {
    fp.validate();
    const double hl = fp.length * 0.5, hw = fp.width * 0.5;
    const double c = std::cos(heading), s = std::sin(heading);
    // AABB of the rotated rectangle bounds the cell scan.
    const double rx = std::fabs(c) * hl + std::fabs(s) * hw;
    const double ry = std::fabs(s) * hl + std::fabs(c) * hw;
    const BevSpec& spec = bev.spec;
    const int x0 = std::max(0, int(std::floor((x - rx - spec.origin.x) / spec.resolution)));
    const int x1 = std::min(spec.dims_x - 1,
                            int(std::floor((x + rx - spec.origin.x) / spec.resolution)));
    const int y0 = std::max(0, int(std::floor((y - ry - spec.origin.y) / spec.resolution)));
    const int y1 = std::min(spec.dims_y - 1,
                            int(std::floor((y + ry - spec.origin.y) / spec.resolution)));
    int hits = 0;
    for (int cy = y0; cy <= y1; ++cy)
        for (int cx = x0; cx <= x1; ++cx) {
            if (!bev.at(cx, cy)) continue;
            const Vec2 cc = spec.cell_center(cx, cy);
            const double dx = cc.x - x, dy = cc.y - y;
            const double u = c * dx + s * dy;   // along heading
            const double v = -s * dx + c * dy;  // across
            if (std::fabs(u) <= hl && std::fabs(v) <= hw) ++hits;
        }
    return hits;
}

}  // namespace occkit
