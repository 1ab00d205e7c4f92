#include <algorithm>
#include <cmath>
#include <string>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

void FlowConfig::validate() const {
    if (!(velocity_threshold >= 0.0) || !std::isfinite(velocity_threshold))
        throw Error("flow config: velocity threshold must be >= 0");
}

bool is_moving(const Vec2& velocity, const FlowConfig& cfg) {
    return std::hypot(velocity.x, velocity.y) >= cfg.velocity_threshold;
}

void GenConfig::validate() const {
    grid.validate();
    flow.validate();
    if (densify_neighborhood < 1) throw Error("gen config: densify radius must be >= 1");
    if (densify_min_neighbors < 1)
        throw Error("gen config: densify min neighbors must be >= 1");
    if (min_points_per_voxel < 1)
        throw Error("gen config: min points per voxel must be >= 1");
    if (hole_fill_min_neighbors < 1 || hole_fill_min_neighbors > 8)
        throw Error("gen config: hole fill neighbors must be in [1, 8]");
    for (Label l : hole_fill_classes)
        if (!is_semantic(l))
            throw Error("gen config: hole fill class " + std::to_string(int(l)) +
                        " is not a semantic label");
    if (threads < 1) throw Error("gen config: threads must be >= 1");
}

TrackTable collect_tracks(const std::vector<Frame>& frames) {
    TrackTable t;
    for (const auto& f : frames) {
        if (!f.is_key_frame) continue;
        for (const auto& b : f.boxes) t.key_boxes[b.track_id].push_back(b);
    }
    for (auto& [tid, boxes] : t.key_boxes) {
        std::sort(boxes.begin(), boxes.end(), [](const Box3D& a, const Box3D& b) {
            return a.timestamp_us < b.timestamp_us;
        });
        for (std::size_t i = 1; i < boxes.size(); ++i)
            if (boxes[i].timestamp_us == boxes[i - 1].timestamp_us)
                throw Error("track " + std::to_string(tid) +
                            ": duplicate key-frame timestamp " +
                            std::to_string(boxes[i].timestamp_us));
    }
    return t;
}

std::vector<Box3D> boxes_at(const TrackTable& tracks, std::int64_t t_us) {
    std::vector<Box3D> out;
    for (const auto& [tid, boxes] : tracks.key_boxes) {
        if (boxes.empty()) continue;
        if (t_us < boxes.front().timestamp_us || t_us > boxes.back().timestamp_us)
            continue;
        const auto it = std::lower_bound(
            boxes.begin(), boxes.end(), t_us,
            [](const Box3D& b, std::int64_t t) { return b.timestamp_us < t; });
        if (it != boxes.end() && it->timestamp_us == t_us) {
            out.push_back(*it);
            continue;
        }
        const Box3D& hi = *it;
        const Box3D& lo = *std::prev(it);
        const double u = double(t_us - lo.timestamp_us) /
                         double(hi.timestamp_us - lo.timestamp_us);
        Box3D b = interpolate_box(lo, hi, u);
        b.timestamp_us = t_us;
        out.push_back(b);
    }
    return out;
}

SplitResult split_points(const PointCloud& points, const std::vector<Box3D>& boxes) {
    points.validate();
    SplitResult res;
    res.background.timestamp_us = points.timestamp_us;
    res.background.frame = points.frame;
    const bool has_labels = !points.labels.empty();
    const bool has_intensity = !points.intensity.empty();

    const auto append = [&](PointCloud& dst, std::size_t i) {
        dst.points.push_back(points.points[i]);
        if (has_labels) dst.labels.push_back(points.labels[i]);
        if (has_intensity) dst.intensity.push_back(points.intensity[i]);
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points.points[i];
        const Box3D* best = nullptr;
        double best_d2 = 0.0;
        for (const auto& b : boxes) {
            if (!point_in_box(p, b)) continue;
            const Vec3 d = p - b.center;
            const double d2 = d.dot(d);
            if (!best || d2 < best_d2 || (d2 == best_d2 && b.track_id < best->track_id)) {
                best = &b;
                best_d2 = d2;
            }
        }
        if (!best) {
            append(res.background, i);
        } else {
            auto& dst = res.per_object[best->track_id];
            if (dst.points.empty()) {
                dst.timestamp_us = points.timestamp_us;
                dst.frame = points.frame;
            }
            append(dst, i);
        }
    }
    return res;
}

}  // namespace occkit::occgen
