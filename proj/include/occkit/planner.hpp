#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/trajectory.hpp"
#include "occkit/types.hpp"

namespace occkit::planner {

struct NoFeasibleCandidate : Error {
    using Error::Error;
};

enum class CommandKind { forward, turn_left, turn_right };

const char* command_name(CommandKind k);

struct Command {
    CommandKind kind = CommandKind::forward;
    double lateral_threshold = 2.0;  // meters of endpoint y deciding a turn

    void validate() const;
};

struct SamplerConfig {
    int count = 64;
    double horizon = 3.0;  // seconds
    double dt = 0.25;      // seconds; must divide horizon
    double v0_min = 0.0, v0_max = 8.0;        // m/s
    double accel_min = -2.0, accel_max = 2.0;  // m/s^2
    double kappa_min = -0.2, kappa_max = 0.2;  // 1/m
    std::uint64_t seed = 0;

    void validate() const;
    int steps() const;  // samples after t=0
};

struct CostWeights {
    double safety = 1.0;
    double comfort = 1.0;
    double progress = 1.0;
    // Safety normalization per BEV source; 0 means the BEV's occupied-cell
    // count (at least 1).
    double norm_occupancy = 0.0;
    double norm_boxes = 0.0;

    void validate() const;
};

enum class BevSource { occupancy, boxes };

struct CandidateParams {
    double v0 = 0.0, accel = 0.0, kappa = 0.0;
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;
    std::vector<CandidateParams> params;
};

// `count` constant-curvature, constant-acceleration arcs from the origin
// (heading +x), uniform in time. The (v0, a, kappa) draws are stratified over
// a lattice covering the ranges with one jittered sample per cell, so every
// region of the parameter box is represented at every seed. Speed clamps at
// zero; the arc holds position once stopped.
TrajectorySet sample_trajectories(const SamplerConfig& cfg);

CommandKind classify_command(const Trajectory& traj, double lateral_threshold);

// Occupied-cell count under the footprint, summed over samples, divided by
// the normalization constant.
double safety_cost(const Trajectory& traj, const BevGrid& bev, const Footprint& fp,
                   double normalization);

// Mean squared longitudinal jerk plus mean squared lateral acceleration
// (yaw_rate * speed), finite-differenced on the sample grid.
double comfort_cost(const Trajectory& traj);

// Negative forward displacement of the endpoint.
double progress_cost(const Trajectory& traj);

struct CandidateCost {
    int index = 0;
    CommandKind command = CommandKind::forward;
    double safety = 0.0, comfort = 0.0, progress = 0.0, total = 0.0;
};

struct CostReport {
    BevSource source = BevSource::occupancy;
    double normalization = 1.0;
    std::vector<CandidateCost> candidates;  // command-matching ones only
    int selected = -1;                      // index into the full set
    std::string forms =
        "safety=footprint-overlap/norm comfort=jerk^2+lateral^2 progress=-x_end";
};

// Argmin of the weighted total over command-matching candidates; ties go to
// the lower candidate index. Throws NoFeasibleCandidate when none matches.
Trajectory select_trajectory(const TrajectorySet& set, const BevGrid& bev,
                             const Command& command, const CostWeights& weights,
                             const Footprint& footprint, BevSource source,
                             CostReport* report = nullptr);

// Vehicle and pedestrian label codes, the default collision-relevant set.
const std::vector<Label>& vehicle_pedestrian_classes();

// BEV occupancy by squeezing the grid along z. keep_classes empty = every
// semantic class counts; otherwise only the listed codes.
BevGrid squeeze_to_bev(const VoxelGrid& grid, const std::vector<Label>& keep_classes);

// BEV occupancy from box footprints (cell-center containment).
BevGrid boxes_to_bev(const std::vector<Box3D>& boxes, const BevSpec& spec,
                     const std::vector<Label>& keep_classes);

struct PlanResult {
    Trajectory trajectory;
    CostReport report;
    TrajectorySet candidates;
    BevGrid bev;
};

PlanResult plan_from_grid(const VoxelGrid& grid, const std::vector<Label>& keep_classes,
                          const Command& command, const SamplerConfig& sampler,
                          const CostWeights& weights, const Footprint& footprint);

PlanResult plan_from_boxes(const std::vector<Box3D>& boxes, const BevSpec& spec,
                           const std::vector<Label>& keep_classes,
                           const Command& command, const SamplerConfig& sampler,
                           const CostWeights& weights, const Footprint& footprint);

}  // namespace occkit::planner
