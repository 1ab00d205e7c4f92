#include <optional>
#include <string>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

namespace {

PointCloud frame_points_world(const Frame& f) {
    PointCloud world = transform_points(f.point_cloud, f.ego_pose.compose(f.sensor_pose));
    world.frame = PointFrame::world;
    world.timestamp_us = f.timestamp_us;
    return world;
}

// Pose authority for a track at time t: an exact key-frame box when one
// exists, an interpolated one inside the span, nothing outside it.
std::optional<Box3D> pose_box(const TrackTable& tracks, std::uint64_t tid,
                              std::int64_t t_us) {
    const auto it = tracks.key_boxes.find(tid);
    if (it == tracks.key_boxes.end() || it->second.empty()) return std::nullopt;
    const auto& boxes = it->second;
    if (t_us < boxes.front().timestamp_us || t_us > boxes.back().timestamp_us)
        return std::nullopt;
    for (const auto& candidate : boxes_at(tracks, t_us))
        if (candidate.track_id == tid) return candidate;
    return std::nullopt;
}

// Boxes defining membership at this frame: native annotations on key frames,
// interpolated tracks elsewhere.
std::vector<Box3D> membership_boxes(const Frame& f, const TrackTable& tracks) {
    if (f.is_key_frame) return f.boxes;
    return boxes_at(tracks, f.timestamp_us);
}

}  // namespace

PointCloud accumulate_background(const std::vector<Frame>& frames,
                                 const TrackTable& tracks) {
    PointCloud out;
    out.frame = PointFrame::world;
    for (const auto& f : frames) {
        const PointCloud world = frame_points_world(f);
        SplitResult split = split_points(world, membership_boxes(f, tracks));
        const bool labeled = f.is_key_frame && !split.background.labels.empty();
        for (std::size_t i = 0; i < split.background.size(); ++i) {
            out.points.push_back(split.background.points[i]);
            out.labels.push_back(labeled ? split.background.labels[i] : kUnknown);
        }
    }
    return out;
}

ForegroundResult accumulate_foreground(const std::vector<Frame>& frames,
                                       const TrackTable& tracks) {
    ForegroundResult res;
    for (const auto& f : frames) {
        const PointCloud world = frame_points_world(f);
        SplitResult split = split_points(world, membership_boxes(f, tracks));
        for (auto& [tid, cloud] : split.per_object) {
            const auto box = pose_box(tracks, tid, f.timestamp_us);
            if (!box) {
                res.dropped_points += cloud.size();
                continue;
            }
            auto& dst = res.per_track[tid];
            dst.frame = PointFrame::body;
            for (const auto& p : cloud.points) {
                dst.points.push_back(box->to_body(p));
                dst.labels.push_back(box->label);
            }
        }
    }
    return res;
}

}  // namespace occkit::occgen
