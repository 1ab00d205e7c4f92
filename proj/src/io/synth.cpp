#include <algorithm>
#include <cmath>
#include <random>

#include "occkit/synth.hpp"

namespace occkit::synth {

namespace {

// Engine output bit-scaled by hand so streams stay reproducible across
// standard library versions.
double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int n) { return int(uniform(rng) * n); }

double gaussian(std::mt19937_64& rng) {
    const double u1 = std::max(uniform(rng), 0x1.0p-60);
    const double u2 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Static world, world frame. Ground is the single cell slab z in [-0.5, 0);
// walls rise to z < 2. Band edges fall between cell centers, so membership
// tests on exact centers never hit a boundary.
Label region_label(const Vec3& w) {
    const double ax = std::abs(w.x), ay = std::abs(w.y);
    if (ax < 40.0 && ay > 10.0 && ay < 11.0 && w.z > -0.5 && w.z < 2.0)
        return 15;  // manmade wall
    if (w.z == -0.25 && ax < 40.0) {
        if (ay < 6.0) return 11;   // drivable surface
        if (ay < 9.0) return 13;   // sidewalk
        if (ay < 10.0) return 14;  // terrain
    }
    return kFree;
}

struct ObjectShape {
    Vec3 half_lattice;  // max |body offset| per axis, multiples of 0.5
    Vec3 size;          // annotation box extents, strictly larger than the lattice
    Label label;
};

// Half extents end in .25/.75 so box faces never coincide with cell centers.
ObjectShape car_shape() { return {{2.0, 1.0, 0.5}, {4.5, 2.5, 1.5}, 4}; }
ObjectShape bus_shape() { return {{3.0, 1.0, 1.0}, {6.5, 2.5, 2.5}, 3}; }
ObjectShape ped_shape() { return {{0.0, 0.0, 0.5}, {0.5, 0.5, 1.5}, 7}; }

struct MovingObject {
    ObjectShape shape;
    Vec3 center0;   // world center at t = 0, on the cell-center lattice
    Vec2 velocity;  // whole m/s so every sweep stays on the lattice
    std::uint64_t track_id = 0;
};

Vec3 object_center(const MovingObject& o, double t_sec) {
    return {o.center0.x + o.velocity.x * t_sec,
            o.center0.y + o.velocity.y * t_sec, o.center0.z};
}

bool in_object(const MovingObject& o, const Vec3& w, double t_sec) {
    const Vec3 c = object_center(o, t_sec);
    return std::abs(w.x - c.x) <= o.shape.half_lattice.x &&
           std::abs(w.y - c.y) <= o.shape.half_lattice.y &&
           std::abs(w.z - c.z) <= o.shape.half_lattice.z;
}

ObjectShape shape_for(int kind) {
    if (kind == 0) return car_shape();
    if (kind == 1) return bus_shape();
    return ped_shape();
}

std::vector<MovingObject> make_objects(Scenario scenario, std::mt19937_64& rng) {
    const double lanes[4] = {-4.75, -1.75, 1.75, 4.75};
    std::vector<MovingObject> objects;
    if (scenario == Scenario::static_scene) {
        MovingObject o;
        o.shape = car_shape();
        o.center0 = {-5.75 + 0.5 * uniform_int(rng, 16),
                     lanes[uniform_int(rng, 4)], 0.25};
        o.velocity = {0.0, 0.0};
        o.track_id = 1;
        objects.push_back(o);
        return objects;
    }
    const int n = 1 + uniform_int(rng, 3);
    int order[4] = {0, 1, 2, 3};
    for (int i = 3; i > 0; --i) std::swap(order[i], order[uniform_int(rng, i + 1)]);
    for (int i = 0; i < n; ++i) {
        MovingObject o;
        o.shape = shape_for(uniform_int(rng, 3));
        const double speed = 1.0 + uniform_int(rng, 2);
        const int dir = uniform_int(rng, 2) ? 1 : -1;
        o.velocity = {dir * speed, 0.0};
        o.center0 = {dir > 0 ? -5.75 + 0.5 * uniform_int(rng, 8)
                             : 5.75 - 0.5 * uniform_int(rng, 8),
                     lanes[order[i]], 0.25};
        o.track_id = std::uint64_t(i + 1);
        objects.push_back(o);
    }
    return objects;
}

std::vector<kernels::CameraModel> make_cameras(std::int64_t ts) {
    // Base rotation sends camera +z (depth) to ego +x; the yaw sweep points
    // the four cameras forward, left, back, right.
    const Quat base{0.5, -0.5, 0.5, -0.5};
    std::vector<kernels::CameraModel> cams;
    for (double yaw : {0.0, 1.5707963267948966, 3.141592653589793,
                       -1.5707963267948966}) {
        kernels::CameraModel cam;
        cam.fx = cam.fy = 300.0;
        cam.cx = 319.5;
        cam.cy = 239.5;
        cam.width = 640;
        cam.height = 480;
        cam.extrinsic.translation = {0.0, 0.0, 1.75};
        cam.extrinsic.rotation = (Quat::from_yaw(yaw) * base).normalized();
        cam.extrinsic.timestamp_us = ts;
        cams.push_back(cam);
    }
    return cams;
}

struct Emitter {
    const SynthConfig& cfg;
    std::mt19937_64& rng;
    PointCloud& pc;

    void operator()(Vec3 p, Label l) {
        if (cfg.dropout > 0.0 && uniform(rng) < cfg.dropout) return;
        if (cfg.noise > 0.0)
            p = p + Vec3{gaussian(rng), gaussian(rng), gaussian(rng)} * cfg.noise;
        pc.points.push_back(p);
        pc.labels.push_back(l);
    }
};

void sample_object_points(const MovingObject& o, double t_sec, const Vec3& ego,
                          const GridSpec& grid, Emitter& emit) {
    const Vec3 c = object_center(o, t_sec);
    const int nx = int(std::lround(o.shape.half_lattice.x * 4.0)) + 1;
    const int ny = int(std::lround(o.shape.half_lattice.y * 4.0)) + 1;
    const int nz = int(std::lround(o.shape.half_lattice.z * 4.0)) + 1;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const Vec3 w{c.x - o.shape.half_lattice.x + i * 0.5,
                             c.y - o.shape.half_lattice.y + j * 0.5,
                             c.z - o.shape.half_lattice.z + k * 0.5};
                const Vec3 p = w - ego;
                if (world_to_voxel(p, grid)) emit(p, o.shape.label);
            }
}

occgen::Frame build_frame(const SynthConfig& cfg,
                          const std::vector<MovingObject>& objects, double t_sec,
                          std::int64_t ts, bool key, std::mt19937_64& rng) {
    occgen::Frame frame;
    frame.timestamp_us = ts;
    frame.is_key_frame = key;
    frame.ego_pose.translation = {2.0 * t_sec, 0.0, 0.0};
    frame.ego_pose.timestamp_us = ts;
    frame.sensor_pose.timestamp_us = ts;
    frame.point_cloud.frame = PointFrame::sensor;
    frame.point_cloud.timestamp_us = ts;

    Emitter emit{cfg, rng, frame.point_cloud};
    const Vec3 ego = frame.ego_pose.translation;
    const GridSpec& g = cfg.grid;
    for (int z = 0; z < g.dims.z; ++z)
        for (int y = 0; y < g.dims.y; ++y)
            for (int x = 0; x < g.dims.x; ++x) {
                const Vec3 w = voxel_center({x, y, z}, g) + ego;
                const Label l = region_label(w);
                if (l != kFree) emit(w - ego, l);
            }
    for (const auto& o : objects) sample_object_points(o, t_sec, ego, g, emit);
    frame.point_cloud.intensity.assign(frame.point_cloud.points.size(), 0.0f);

    if (key) {
        for (const auto& o : objects) {
            Box3D box;
            box.center = object_center(o, t_sec);
            box.size = o.shape.size;
            box.yaw = 0.0;
            box.velocity = o.velocity;
            box.label = o.shape.label;
            box.track_id = o.track_id;
            box.timestamp_us = ts;
            frame.boxes.push_back(box);
        }
        if (cfg.with_cameras) frame.cameras = make_cameras(ts);
    }
    return frame;
}

VoxelGrid build_gt(const SynthConfig& cfg, const std::vector<MovingObject>& objects,
                   double t_sec) {
    VoxelGrid gt(cfg.grid);
    gt.enable_flow();
    const occgen::FlowConfig flow_cfg;
    const Vec3 ego{2.0 * t_sec, 0.0, 0.0};
    const GridSpec& g = cfg.grid;
    std::size_t flat = 0;
    for (int z = 0; z < g.dims.z; ++z)
        for (int y = 0; y < g.dims.y; ++y)
            for (int x = 0; x < g.dims.x; ++x, ++flat) {
                const Vec3 w = voxel_center({x, y, z}, g) + ego;
                Label l = kFree;
                for (const auto& o : objects)
                    if (in_object(o, w, t_sec)) {
                        l = o.shape.label;
                        if (occgen::is_moving(o.velocity, flow_cfg)) {
                            gt.flow[flat * 2] = float(o.velocity.x);
                            gt.flow[flat * 2 + 1] = float(o.velocity.y);
                        }
                        break;
                    }
                if (l == kFree) l = region_label(w);
                gt.labels[flat] = l;
            }
    return gt;
}

// Crane canonical points, body frame: a 2x2x1.5 m cab and a 0.125 m pitch
// lattice; the boom is a thin beam along +axis. Offsets are odd sixteenths,
// interior to every half- and quarter-meter cell.
void crane_points(std::vector<Vec3>& out, bool boom_along_x) {
    for (int k = 0; k < 12; ++k)
        for (int j = 0; j < 16; ++j)
            for (int i = 0; i < 16; ++i)
                out.push_back({-0.9375 + i * 0.125, -0.9375 + j * 0.125,
                               -0.6875 + k * 0.125});
    const int len = boom_along_x ? 24 : 28;
    for (int i = 0; i < len; ++i)
        for (double a : {-0.0625, 0.0625})
            for (double zc : {0.1875, 0.3125}) {
                if (boom_along_x)
                    out.push_back({1.0625 + i * 0.125, a, zc});
                else
                    out.push_back({a, -(1.0625 + i * 0.125), zc});
            }
}

SynthScene protrusion_scene(const SynthConfig& cfg) {
    SynthScene out;
    out.grid = cfg.grid;
    std::mt19937_64 rng(cfg.seed + 1);
    const Vec3 origin{6.25 + 0.5 * uniform_int(rng, 5),
                      2.25 + 0.5 * uniform_int(rng, 3), 0.25};
    std::vector<Vec3> body;
    crane_points(body, true);

    occgen::Frame frame;
    frame.is_key_frame = true;
    frame.point_cloud.frame = PointFrame::sensor;
    Emitter emit{cfg, rng, frame.point_cloud};
    for (const Vec3& b : body) emit(origin + b, 5);
    frame.point_cloud.intensity.assign(frame.point_cloud.points.size(), 0.0f);

    Box3D box;
    box.center = cfg.box_covers_arm ? origin + Vec3{1.5, 0.0, 0.0} : origin;
    box.size = cfg.box_covers_arm ? Vec3{5.5, 2.5, 2.5} : Vec3{2.5, 2.5, 2.5};
    box.label = 5;  // construction vehicle
    box.track_id = 1;
    frame.boxes.push_back(box);
    out.frames.push_back(std::move(frame));

    VoxelGrid gt(cfg.grid);
    gt.enable_flow();
    for (const Vec3& b : body)
        if (auto v = world_to_voxel(origin + b, cfg.grid))
            gt.labels[cfg.grid.flat(v->x, v->y, v->z)] = 5;
    out.gt.push_back(std::move(gt));
    out.key_timestamps_us.push_back(0);
    return out;
}

}  // namespace

SynthConfig::SynthConfig() : grid(scene_grid()) {}

void SynthConfig::validate() const {
    grid.validate();
    if (key_frames < 1) throw Error("SynthConfig: key_frames must be >= 1");
    if (sweeps_per_gap < 0) throw Error("SynthConfig: sweeps_per_gap must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw Error("SynthConfig: dropout must be in [0, 1)");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw Error("SynthConfig: noise must be finite and >= 0");
}

GridSpec scene_grid() {
    GridSpec g;
    g.origin = {-16.0, -16.0, -2.0};
    g.resolution = 0.5;
    g.dims = {64, 64, 8};
    return g;
}

GridSpec protrusion_grid(double resolution) {
    if (resolution != 0.5 && resolution != 0.25)
        throw Error("protrusion_grid: resolution must be 0.5 or 0.25");
    GridSpec g;
    g.origin = {0.0, -8.0, -2.0};
    g.resolution = resolution;
    const int s = resolution == 0.5 ? 1 : 2;
    g.dims = {32 * s, 32 * s, 8 * s};
    return g;
}

SynthScene synth_scene(const SynthConfig& cfg) {
    cfg.validate();
    if (cfg.scenario == Scenario::protrusion) return protrusion_scene(cfg);

    SynthScene out;
    out.grid = cfg.grid;
    std::mt19937_64 rng(cfg.seed + 1);
    const auto objects = make_objects(cfg.scenario, rng);

    for (int k = 0; k < cfg.key_frames; ++k) {
        const std::int64_t key_ts = std::int64_t(k) * 1000000;
        out.frames.push_back(build_frame(cfg, objects, double(k), key_ts, true, rng));
        out.key_timestamps_us.push_back(key_ts);
        out.gt.push_back(build_gt(cfg, objects, double(k)));
        if (k + 1 == cfg.key_frames) break;
        for (int j = 1; j <= cfg.sweeps_per_gap; ++j) {
            const double frac = double(j) / (cfg.sweeps_per_gap + 1);
            const std::int64_t ts = key_ts + std::llround(frac * 1e6);
            out.frames.push_back(
                build_frame(cfg, objects, double(k) + frac, ts, false, rng));
        }
    }
    return out;
}

CorridorScene synth_corridor(std::uint64_t seed) {
    GridSpec spec;
    spec.origin = {-16.0, -16.0, -2.0};
    spec.resolution = 0.5;
    spec.dims = {128, 64, 8};
    CorridorScene scene{VoxelGrid(spec), 0.0};
    std::mt19937_64 rng(seed + 1);
    scene.block_x = 10.0 + 0.5 * uniform_int(rng, 20);

    std::size_t flat = 0;
    for (int z = 0; z < spec.dims.z; ++z)
        for (int y = 0; y < spec.dims.y; ++y)
            for (int x = 0; x < spec.dims.x; ++x, ++flat) {
                const Vec3 c = voxel_center({x, y, z}, spec);
                if (c.z > 0.0) continue;
                const double ay = std::abs(c.y);
                if (c.x > -4.0 && c.x < 28.0 && ay > 3.5 && ay < 5.5)
                    scene.grid.labels[flat] = 15;  // walls
                else if (c.x > scene.block_x && c.x < scene.block_x + 1.5 && ay < 3.0)
                    scene.grid.labels[flat] = 4;  // frontal block
            }
    return scene;
}

ProtrusionPlanningScene synth_protrusion_planning(std::uint64_t seed) {
    GridSpec spec;
    spec.origin = {-16.0, -16.0, -2.0};
    spec.resolution = 0.5;
    spec.dims = {128, 64, 8};
    ProtrusionPlanningScene scene{VoxelGrid(spec), {}};
    std::mt19937_64 rng(seed + 1);
    const Vec3 origin{8.25 + 0.5 * uniform_int(rng, 8), 5.25, 0.25};

    std::vector<Vec3> body;
    crane_points(body, false);  // boom reaches toward -y, into the lane
    for (const Vec3& b : body)
        if (auto v = world_to_voxel(origin + b, spec))
            scene.grid.labels[spec.flat(v->x, v->y, v->z)] = 5;

    Box3D box;
    box.center = origin;
    box.size = {2.5, 2.5, 2.5};  // cab only, the boom is unannotated
    box.label = 5;
    box.track_id = 1;
    scene.boxes.push_back(box);
    return scene;
}

}  // namespace occkit::synth
