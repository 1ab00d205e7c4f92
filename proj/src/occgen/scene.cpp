#include <atomic>
#include <exception>
#include <string>
#include <thread>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

namespace {

PointCloud unknown_subset(const PointCloud& cloud) {
    PointCloud out;
    out.frame = cloud.frame;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (cloud.labels[i] == kUnknown) out.points.push_back(cloud.points[i]);
    return out;
}

struct FrameOutput {
    VoxelGrid grid;
    std::int64_t timestamp_us = 0;
    std::size_t densified = 0;
    std::size_t filled = 0;
};

}  // namespace

SceneResult generate_scene(const std::vector<Frame>& frames, const GenConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 1; i < frames.size(); ++i)
        if (frames[i].timestamp_us <= frames[i - 1].timestamp_us)
            throw Error("frame " + std::to_string(i) + ": timestamps must increase");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        frames[i].ego_pose.validate();
        frames[i].sensor_pose.validate();
        if (frames[i].is_key_frame)
            for (const auto& b : frames[i].boxes) b.validate();
    }

    const TrackTable tracks = collect_tracks(frames);
    const PointCloud background = accumulate_background(frames, tracks);
    const PointCloud unlabeled = unknown_subset(background);
    const ForegroundResult fg = accumulate_foreground(frames, tracks);

    std::vector<std::size_t> key_indices;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (frames[i].is_key_frame) key_indices.push_back(i);

    std::vector<FrameOutput> outputs(key_indices.size());
    std::vector<std::exception_ptr> errors(key_indices.size());

    const auto process = [&](std::size_t slot) {
        const Frame& frame = frames[key_indices[slot]];
        const Pose ego_inv = frame.ego_pose.inverse();

        PointCloud bg_ego = transform_points(background, ego_inv);
        bg_ego.frame = PointFrame::ego;
        VoxelGrid bg_grid = voxelize_majority(bg_ego, cfg.grid, cfg.min_points_per_voxel);

        std::vector<Box3D> boxes_ego;
        for (const auto& b : boxes_at(tracks, frame.timestamp_us))
            boxes_ego.push_back(transform_box(ego_inv, b));

        PlacedGrid placed =
            place_objects(bg_grid, fg.per_track, boxes_ego, cfg.min_points_per_voxel);
        annotate_flow(placed, boxes_ego, cfg.flow);

        FrameOutput& out = outputs[slot];
        PointCloud unl_ego = transform_points(unlabeled, ego_inv);
        out.densified = densify_from_unlabeled(placed.grid, unl_ego,
                                               cfg.densify_neighborhood,
                                               cfg.densify_min_neighbors);
        out.filled = fill_holes(placed.grid, cfg.hole_fill_classes,
                                cfg.hole_fill_min_neighbors);
        if (cfg.compute_visibility && !frame.cameras.empty())
            visibility_mask(placed.grid, frame.cameras, frame.ego_pose);

        out.grid = std::move(placed.grid);
        out.timestamp_us = frame.timestamp_us;
    };

    const auto run_slot = [&](std::size_t slot) {
        try {
            process(slot);
        } catch (const std::exception& e) {
            errors[slot] = std::make_exception_ptr(
                Error("frame " + std::to_string(key_indices[slot]) + ": " + e.what()));
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(std::size_t(cfg.threads), std::max<std::size_t>(key_indices.size(), 1));
    if (workers <= 1) {
        for (std::size_t s = 0; s < key_indices.size(); ++s) run_slot(s);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t s = next.fetch_add(1); s < key_indices.size();
                     s = next.fetch_add(1))
                    run_slot(s);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    SceneResult res;
    res.stats.dropped_points = fg.dropped_points;
    for (auto& out : outputs) {
        res.stats.densified_voxels += out.densified;
        res.stats.filled_voxels += out.filled;
        res.stats.occupied_per_frame.push_back(out.grid.occupied_count());
        res.timestamps_us.push_back(out.timestamp_us);
        res.grids.push_back(std::move(out.grid));
    }
    return res;
}

}  // namespace occkit::occgen
