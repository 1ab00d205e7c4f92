#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

namespace {

struct Walker {
    Index3 cell{};
    Index3 step{};
    Vec3 t_max{};    // ray parameter at the next face crossing, per axis
    Vec3 t_delta{};  // parameter advance per cell, per axis
    bool alive = false;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clip [0, 1] ray segment p(t) = start + t * dir to the volume and set up the
// cell walk at the entry point.
Walker start_walk(const Vec3& start, const Vec3& dir, const GridSpec& spec) {
    Walker w;
    double t0 = 0.0, t1 = 1.0;
    const double lo[3] = {spec.origin.x, spec.origin.y, spec.origin.z};
    const double d[3] = {dir.x, dir.y, dir.z};
    const double s[3] = {start.x, start.y, start.z};
    const int dims[3] = {spec.dims.x, spec.dims.y, spec.dims.z};
    for (int a = 0; a < 3; ++a) {
        const double hi = lo[a] + dims[a] * spec.resolution;
        if (d[a] == 0.0) {
            if (s[a] < lo[a] || s[a] >= hi) return w;
            continue;
        }
        double ta = (lo[a] - s[a]) / d[a];
        double tb = (hi - s[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return w;

    const Vec3 entry = start + dir * t0;
    const double e[3] = {entry.x, entry.y, entry.z};
    int cell[3];
    int stp[3];
    double tmax[3], tdelta[3];
    for (int a = 0; a < 3; ++a) {
        int c = int(std::floor((e[a] - lo[a]) / spec.resolution));
        c = std::clamp(c, 0, dims[a] - 1);
        cell[a] = c;
        if (d[a] > 0.0) {
            stp[a] = 1;
            tmax[a] = (lo[a] + (c + 1) * spec.resolution - s[a]) / d[a];
            tdelta[a] = spec.resolution / d[a];
        } else if (d[a] < 0.0) {
            stp[a] = -1;
            tmax[a] = (lo[a] + c * spec.resolution - s[a]) / d[a];
            tdelta[a] = spec.resolution / -d[a];
        } else {
            stp[a] = 0;
            tmax[a] = kInf;
            tdelta[a] = kInf;
        }
    }
    w.cell = {cell[0], cell[1], cell[2]};
    w.step = {stp[0], stp[1], stp[2]};
    w.t_max = {tmax[0], tmax[1], tmax[2]};
    w.t_delta = {tdelta[0], tdelta[1], tdelta[2]};
    w.alive = true;
    return w;
}

// Advance one cell. Face-crossing ties step the axis whose destination cell
// compares lexicographically smaller as (z, y, x).
void advance(Walker& w, const GridSpec& spec) {
    double* tm[3] = {&w.t_max.x, &w.t_max.y, &w.t_max.z};
    const double* td[3] = {&w.t_delta.x, &w.t_delta.y, &w.t_delta.z};
    int* cells[3] = {&w.cell.x, &w.cell.y, &w.cell.z};
    const int steps[3] = {w.step.x, w.step.y, w.step.z};

    const double m = std::min({*tm[0], *tm[1], *tm[2]});
    int axis = -1;
    std::array<int, 3> best{};
    for (int a = 0; a < 3; ++a) {
        if (*tm[a] != m) continue;
        const std::array<int, 3> candidate = {
            a == 2 ? w.cell.z + steps[2] : w.cell.z,
            a == 1 ? w.cell.y + steps[1] : w.cell.y,
            a == 0 ? w.cell.x + steps[0] : w.cell.x,
        };
        if (axis < 0 || candidate < best) {
            axis = a;
            best = candidate;
        }
    }
    *cells[axis] += steps[axis];
    *tm[axis] += *td[axis];
    w.alive = spec.in_bounds(w.cell);
}

// True when no occupied voxel sits strictly between the start point and the
// target cell.
bool reaches(const VoxelGrid& grid, const Vec3& start, const Index3& target) {
    const GridSpec& spec = grid.spec;
    const Vec3 dir = voxel_center(target, spec) - start;
    Walker w = start_walk(start, dir, spec);
    // Generous bound: the walk can cross each slab of cells at most once plus
    // tie slack.
    const int max_steps = 2 * (spec.dims.x + spec.dims.y + spec.dims.z) + 8;
    for (int i = 0; w.alive && i <= max_steps; ++i) {
        if (w.cell == target) return true;
        if (grid.labels[spec.flat(w.cell.x, w.cell.y, w.cell.z)] != kFree) return false;
        advance(w, spec);
    }
    return false;
}

}  // namespace

void visibility_mask(VoxelGrid& grid, const std::vector<CameraModel>& cameras,
                     const Pose& ego_pose) {
    if (cameras.empty()) throw Error("visibility_mask: need at least one camera");
    for (const auto& c : cameras) c.validate();
    ego_pose.validate();
    const GridSpec& spec = grid.spec;
    grid.enable_visibility(0);

    std::vector<Pose> ego_to_cam;
    std::vector<Vec3> centers;
    for (const auto& c : cameras) {
        ego_to_cam.push_back(c.extrinsic.inverse());
        centers.push_back(c.extrinsic.translation);
    }

    for (int z = 0; z < spec.dims.z; ++z)
        for (int y = 0; y < spec.dims.y; ++y)
            for (int x = 0; x < spec.dims.x; ++x) {
                const Index3 v{x, y, z};
                const Vec3 center = voxel_center(v, spec);
                for (std::size_t ci = 0; ci < cameras.size(); ++ci) {
                    const CameraModel& cam = cameras[ci];
                    const Vec3 pc = ego_to_cam[ci].apply(center);
                    if (!(pc.z > 0.0)) continue;
                    const double u = cam.fx * pc.x / pc.z + cam.cx;
                    const double vv = cam.fy * pc.y / pc.z + cam.cy;
                    if (u < 0.0 || u >= double(cam.width) || vv < 0.0 ||
                        vv >= double(cam.height))
                        continue;
                    if (reaches(grid, centers[ci], v)) {
                        grid.visibility[spec.flat(x, y, z)] = 1;
                        break;
                    }
                }
            }
}

}  // namespace occkit::occgen
