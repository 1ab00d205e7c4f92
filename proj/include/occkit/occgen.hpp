#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/kernels/camera.hpp"
#include "occkit/types.hpp"

namespace occkit::occgen {

using kernels::CameraModel;

// One lidar sweep plus its poses. Boxes are given in the world frame and
// only on key frames; intermediate frames get theirs by interpolation.
struct Frame {
    PointCloud point_cloud;  // sensor frame
    Pose ego_pose;           // ego -> world
    Pose sensor_pose;        // sensor -> ego
    std::vector<Box3D> boxes;
    bool is_key_frame = false;
    std::vector<CameraModel> cameras;
    std::int64_t timestamp_us = 0;
};

struct FlowConfig {
    double velocity_threshold = 0.2;  // m/s; at or above counts as moving

    void validate() const;
};

bool is_moving(const Vec2& velocity, const FlowConfig& cfg);

struct GenConfig {
    GridSpec grid;
    FlowConfig flow;
    int densify_neighborhood = 1;   // Chebyshev radius in voxels
    int densify_min_neighbors = 1;  // labeled voxels required inside the radius
    int min_points_per_voxel = 1;   // labeled points needed for a majority vote
    std::vector<Label> hole_fill_classes = {11, 13, 14};  // drivable, sidewalk, terrain
    int hole_fill_min_neighbors = 5;                      // of the 8 same-z neighbors
    bool compute_visibility = true;
    int threads = 1;

    void validate() const;
};

// Key-frame boxes grouped per track, time-sorted.
struct TrackTable {
    std::map<std::uint64_t, std::vector<Box3D>> key_boxes;
};

TrackTable collect_tracks(const std::vector<Frame>& frames);

// Boxes of every track whose key-frame span covers t, interpolated to t.
// World frame.
std::vector<Box3D> boxes_at(const TrackTable& tracks, std::int64_t t_us);

struct SplitResult {
    PointCloud background;
    std::map<std::uint64_t, PointCloud> per_object;
};

// Every point lands in exactly one output set. A point inside several boxes
// goes to the nearest box center; ties take the smaller track_id. Points and
// boxes must share a frame.
SplitResult split_points(const PointCloud& points, const std::vector<Box3D>& boxes);

// Union of all frames' background points in the world frame. Labels survive
// from key frames; intermediate-frame points become unknown (255).
PointCloud accumulate_background(const std::vector<Frame>& frames,
                                 const TrackTable& tracks);

struct ForegroundResult {
    // Pooled per-track clouds in the box body frame; every point carries its
    // box's label.
    std::map<std::uint64_t, PointCloud> per_track;
    std::size_t dropped_points = 0;  // frames outside a track's key-frame span
};

ForegroundResult accumulate_foreground(const std::vector<Frame>& frames,
                                       const TrackTable& tracks);

// Majority vote over labeled points per voxel (unknown points never vote).
// A voxel gets the most frequent label once at least min_points labeled
// points landed in it; ties take the smaller code.
VoxelGrid voxelize_majority(const PointCloud& points, const GridSpec& spec,
                            int min_points);

// Labels plus the owning track of every foreground voxel.
struct PlacedGrid {
    static constexpr std::uint64_t kNoTrack = ~std::uint64_t(0);
    VoxelGrid grid;
    std::vector<std::uint64_t> track;  // per voxel

    explicit PlacedGrid(const GridSpec& spec)
        : grid(spec), track(spec.voxel_count(), kNoTrack) {}
};

// Writes each object's accumulated cloud, re-posed to its box at the target
// time, over the background. Foreground beats background; voxels claimed by
// several objects follow the split_points tie rule.
PlacedGrid place_objects(const VoxelGrid& background,
                         const std::map<std::uint64_t, PointCloud>& per_track,
                         const std::vector<Box3D>& boxes_at_t, int min_points);

// Foreground voxels inherit their box's planar velocity; background voxels
// get (0, 0). Faults on a non-finite box velocity.
void annotate_flow(PlacedGrid& placed, const std::vector<Box3D>& boxes_at_t,
                   const FlowConfig& cfg);

// Free voxels holding at least one unlabeled point take the majority label of
// the labeled voxels within the Chebyshev radius, when at least min_neighbors
// of them exist; ties take the smaller code. Single simultaneous pass; voxels
// that stay unsupported stay free.
std::size_t densify_from_unlabeled(VoxelGrid& grid, const PointCloud& unlabeled,
                                   int radius, int min_neighbors);

// A free voxel becomes class L iff at least min_neighbors of its 8 same-z
// neighbors carry L, L restricted to the given classes. Simultaneous update;
// competing classes resolve by support count, then smaller code.
std::size_t fill_holes(VoxelGrid& grid, const std::vector<Label>& classes,
                       int min_neighbors);

// Marks every voxel visible iff some camera's ray to its center projects
// inside that camera's image and meets no occupied voxel strictly earlier.
// Grid and cameras share the ego frame, so the ego pose does not bend the
// rays; it is accepted to mirror the rest of the pipeline and validated only.
void visibility_mask(VoxelGrid& grid, const std::vector<CameraModel>& cameras,
                     const Pose& ego_pose);

struct SceneStats {
    std::size_t dropped_points = 0;
    std::size_t densified_voxels = 0;
    std::size_t filled_voxels = 0;
    std::vector<std::size_t> occupied_per_frame;
};

struct SceneResult {
    std::vector<VoxelGrid> grids;  // one per key frame, ego frame, time order
    std::vector<std::int64_t> timestamps_us;
    SceneStats stats;
};

// Full pipeline: split, accumulate background and foreground, then per key
// frame voxelize, place, annotate flow, densify, fill holes and mask
// visibility. Deterministic for fixed inputs regardless of thread count.
SceneResult generate_scene(const std::vector<Frame>& frames, const GenConfig& cfg);

}  // namespace occkit::occgen
