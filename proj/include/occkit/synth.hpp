#pragma once

#include <cstdint>
#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/occgen.hpp"
#include "occkit/types.hpp"

namespace occkit::synth {

// Procedural desk-scale scenes with analytic ground truth. Geometry sits on
// the voxel lattice: ego steps, object speeds and point offsets are all exact
// binary fractions, so zero-noise scenes reproduce their GT bit for bit.
enum class Scenario { static_scene, moving, protrusion };

struct SynthConfig {
    Scenario scenario = Scenario::moving;
    std::uint64_t seed = 0;
    GridSpec grid;               // defaults to scene_grid()
    int key_frames = 3;          // 1 s apart
    int sweeps_per_gap = 1;      // intermediate sweeps between key frames
    double dropout = 0.0;        // per-point drop probability
    double noise = 0.0;          // isotropic point jitter sigma, meters
    bool with_cameras = true;
    bool box_covers_arm = true;  // protrusion: annotation box spans the arm

    SynthConfig();
    void validate() const;
};

struct SynthScene {
    std::vector<occgen::Frame> frames;
    std::vector<VoxelGrid> gt;  // analytic truth per key frame, ego frame
    std::vector<std::int64_t> key_timestamps_us;
    GridSpec grid;
};

// 64 x 64 x 8 cells, 0.5 m, x/y in [-16, 16), z in [-2, 2).
GridSpec scene_grid();
// x in [0, 16), y in [-8, 8), z in [-2, 2) at the given resolution.
GridSpec protrusion_grid(double resolution);

SynthScene synth_scene(const SynthConfig& cfg);

// Walled corridor with a frontal block at a seed-dependent distance.
// Obstacles only; the floor is left free so every cell is a true obstacle.
struct CorridorScene {
    VoxelGrid grid;
    double block_x;  // near face of the block, meters
};
CorridorScene synth_corridor(std::uint64_t seed);

// Roadside crane whose boom reaches into the lane. The annotation box covers
// the cab only, so box-derived obstacles miss the boom while the occupancy
// grid contains it.
struct ProtrusionPlanningScene {
    VoxelGrid grid;            // cab + boom occupancy
    std::vector<Box3D> boxes;  // cab-only annotation
};
ProtrusionPlanningScene synth_protrusion_planning(std::uint64_t seed);

}  // namespace occkit::synth
