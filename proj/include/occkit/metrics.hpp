#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/trajectory.hpp"
#include "occkit/types.hpp"

namespace occkit::metrics {

// Per-class and class-agnostic tallies. Mergeable: evaluating disjoint
// regions and summing equals evaluating the whole volume.
struct ConfusionMatrix {
    // Indexed by label code 1..16; slot 0 unused.
    std::array<std::uint64_t, kNumClasses + 1> tp{}, fp{}, fn{};
    // Occupied-vs-free tallies for the class-agnostic IoU.
    std::uint64_t geo_tp = 0, geo_fp = 0, geo_fn = 0, geo_tn = 0;
    std::uint64_t evaluated = 0;

    void merge(const ConfusionMatrix& o);
};

enum class MaskPolicy { all, visible_only };

// visible_only consults `external` when given, else the GT grid's own
// visibility channel; lacking both is a fault.
struct EvalMask {
    MaskPolicy policy = MaskPolicy::all;
    std::vector<std::uint8_t> external;
};

// Tallies pred against gt voxel by voxel. GT voxels labeled unknown (255)
// are skipped; a 255 in pred faults. Grids must share a spec.
ConfusionMatrix confusion_accumulate(const VoxelGrid& pred, const VoxelGrid& gt,
                                     const EvalMask& mask);

struct MiouResult {
    double value = 0.0;
    std::array<double, kNumClasses + 1> per_class{};
    std::array<bool, kNumClasses + 1> present{};
    int present_count = 0;
};

// IoU_c = TP / (TP + FP + FN), averaged over classes present in pred or gt.
// With no class present anywhere the grids agree trivially: value 1.
MiouResult miou(const ConfusionMatrix& cm);

// Mean IoU over the listed classes, skipping those absent from both sides;
// all-absent yields 1.
double miou_subset(const ConfusionMatrix& cm, const std::vector<Label>& classes);

// Class-agnostic occupied-cell IoU; 1.0 when both sides are empty.
double iou_geo(const ConfusionMatrix& cm);
double iou_geo(const VoxelGrid& pred, const VoxelGrid& gt, const EvalMask& mask);

// Each point inherits its containing voxel's label; out-of-volume points get
// 255 (excluded from any downstream mIoU).
std::vector<Label> lidar_seg_transfer(const PointCloud& points, const VoxelGrid& grid);

// Point-level confusion between transferred and reference labels, skipping
// 255 on either side.
ConfusionMatrix point_confusion(const std::vector<Label>& pred,
                                const std::vector<Label>& gt);

// Voxel gets a box's class iff its center lies inside the box; overlapping
// claims go to the nearest box center, then the smaller track id.
VoxelGrid boxes_to_voxels(const std::vector<Box3D>& boxes, const GridSpec& spec);

// BEV Euclidean distance between the two trajectories at each horizon.
// Horizons beyond either trajectory fault.
std::vector<double> planning_l2(const Trajectory& pred, const Trajectory& gt,
                                const std::vector<double>& horizons);

struct CollisionReport {
    std::vector<double> horizons;
    std::vector<double> rate;                       // per horizon
    std::vector<std::vector<std::uint8_t>> collided;  // [trajectory][horizon]
};

// A trajectory collides at horizon h iff any sample with t <= h overlaps an
// occupied cell under the oriented footprint.
CollisionReport collision_rate(const std::vector<Trajectory>& trajectories,
                               const BevGrid& occupied, const Footprint& footprint,
                               const std::vector<double>& horizons);

}  // namespace occkit::metrics
