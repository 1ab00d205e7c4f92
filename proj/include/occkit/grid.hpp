#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "occkit/types.hpp"

namespace occkit {

// Axis-aligned voxel volume: origin is the min corner, cells are half-open
// intervals [origin + i*res, origin + (i+1)*res). Points exactly on the upper
// face are out of volume.
struct GridSpec {
    Vec3 origin{-50.0, -50.0, -5.0};
    double resolution = 0.5;
    Index3 dims{200, 200, 16};

    void validate() const {
        if (!(resolution > 0.0) || !std::isfinite(resolution))
            throw Error("GridSpec: resolution must be positive");
        if (dims.x < 1 || dims.y < 1 || dims.z < 1)
            throw Error("GridSpec: dims must be >= 1");
        if (!origin.finite()) throw Error("GridSpec: origin must be finite");
    }

    std::size_t voxel_count() const {
        return std::size_t(dims.x) * std::size_t(dims.y) * std::size_t(dims.z);
    }

    // Dense storage order: z slowest, then y, x fastest. Matches the on-disk
    // record sort order (z, y, x).
    std::size_t flat(int x, int y, int z) const {
        return (std::size_t(z) * dims.y + std::size_t(y)) * dims.x + std::size_t(x);
    }

    bool in_bounds(const Index3& i) const {
        return i.x >= 0 && i.x < dims.x && i.y >= 0 && i.y < dims.y && i.z >= 0 &&
               i.z < dims.z;
    }

    bool operator==(const GridSpec& o) const {
        return origin.x == o.origin.x && origin.y == o.origin.y &&
               origin.z == o.origin.z && resolution == o.resolution &&
               dims == o.dims;
    }
};

std::optional<Index3> world_to_voxel(const Vec3& p, const GridSpec& spec);
Vec3 voxel_center(const Index3& idx, const GridSpec& spec);

// Dense labeled occupancy grid with optional per-voxel BEV flow (m/s) and
// a visibility mask. Flow is zero on free voxels; visibility defaults to
// visible.
struct VoxelGrid {
    GridSpec spec;
    std::vector<Label> labels;
    std::vector<float> flow;            // 2 floats per voxel (vx, vy), empty if absent
    std::vector<std::uint8_t> visibility;  // 0/1 per voxel, empty if absent

    VoxelGrid() = default;
    explicit VoxelGrid(const GridSpec& s) : spec(s), labels(s.voxel_count(), kFree) {
        spec.validate();
    }

    bool has_flow() const { return !flow.empty(); }
    bool has_visibility() const { return !visibility.empty(); }

    void enable_flow() { flow.assign(spec.voxel_count() * 2, 0.0f); }
    void enable_visibility(std::uint8_t v = 1) { visibility.assign(spec.voxel_count(), v); }

    Label at(int x, int y, int z) const { return labels[spec.flat(x, y, z)]; }
    Label& at(int x, int y, int z) { return labels[spec.flat(x, y, z)]; }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (Label l : labels)
            if (l != kFree) ++n;
        return n;
    }
};

struct BevSpec {
    Vec2 origin{-50.0, -50.0};
    double resolution = 0.5;
    int dims_x = 200, dims_y = 200;

    std::size_t cell_count() const { return std::size_t(dims_x) * dims_y; }
    std::size_t flat(int x, int y) const { return std::size_t(y) * dims_x + x; }
    Vec2 cell_center(int x, int y) const {
        return {origin.x + (x + 0.5) * resolution, origin.y + (y + 0.5) * resolution};
    }
    bool operator==(const BevSpec&) const = default;
};

struct BevGrid {
    BevSpec spec;
    std::vector<std::uint8_t> cells;  // 0/1

    BevGrid() = default;
    explicit BevGrid(const BevSpec& s) : spec(s), cells(s.cell_count(), 0) {}

    std::uint8_t at(int x, int y) const { return cells[spec.flat(x, y)]; }
    std::uint8_t& at(int x, int y) { return cells[spec.flat(x, y)]; }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (auto c : cells) n += c;
        return n;
    }
};

}  // namespace occkit
