#include <cmath>
#include <cstring>

#include "occkit/io.hpp"

namespace occkit::io {

namespace {

constexpr std::uint8_t kFlagFlow = 1;
constexpr std::uint8_t kFlagVisibility = 2;

void store_u16(std::uint16_t v, std::vector<std::uint8_t>& out) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t(v >> 8));
}

void store_u32(std::uint32_t v, std::vector<std::uint8_t>& out) {
    out.push_back(std::uint8_t(v & 0xff));
    out.push_back(std::uint8_t(v >> 8 & 0xff));
    out.push_back(std::uint8_t(v >> 16 & 0xff));
    out.push_back(std::uint8_t(v >> 24 & 0xff));
}

void store_f32(float f, std::vector<std::uint8_t>& out) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    store_u32(u, out);
}

std::uint16_t load_u16(const std::uint8_t* p) {
    return std::uint16_t(std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8);
}

std::uint32_t load_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
           std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

float load_f32(const std::uint8_t* p) {
    std::uint32_t u = load_u32(p);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

std::size_t record_size(bool flow, bool vis) {
    return 7 + (flow ? 8 : 0) + (vis ? 1 : 0);
}

}  // namespace

std::vector<std::uint8_t> encode_occ(const VoxelGrid& grid) {
    grid.spec.validate();
    if (grid.spec.dims.x > 65536 || grid.spec.dims.y > 65536 ||
        grid.spec.dims.z > 65536)
        throw Error("encode_occ: dims exceed the u16 index range");
    if (grid.labels.size() != grid.spec.voxel_count())
        throw Error("encode_occ: label array does not match dims");
    const bool flow = grid.has_flow();
    const bool vis = grid.has_visibility();

    std::uint32_t count = 0;
    for (Label l : grid.labels)
        if (l != kFree) {
            if (!is_semantic(l) && l != kUnknown)
                throw Error("encode_occ: invalid label code " + std::to_string(int(l)));
            ++count;
        }

    std::vector<std::uint8_t> out;
    out.reserve(kOcc1HeaderSize + std::size_t(count) * record_size(flow, vis));
    out.insert(out.end(), {'O', 'C', 'C', '1'});
    store_u16(kOcc1Version, out);
    store_u32(std::uint32_t(grid.spec.dims.x), out);
    store_u32(std::uint32_t(grid.spec.dims.y), out);
    store_u32(std::uint32_t(grid.spec.dims.z), out);
    store_f32(float(grid.spec.resolution), out);
    store_f32(float(grid.spec.origin.x), out);
    store_f32(float(grid.spec.origin.y), out);
    store_f32(float(grid.spec.origin.z), out);
    out.push_back(std::uint8_t((flow ? kFlagFlow : 0) | (vis ? kFlagVisibility : 0)));
    store_u32(count, out);

    // Flat order is z, then y, then x fastest: exactly the record sort order.
    std::size_t flat = 0;
    for (int z = 0; z < grid.spec.dims.z; ++z)
        for (int y = 0; y < grid.spec.dims.y; ++y)
            for (int x = 0; x < grid.spec.dims.x; ++x, ++flat) {
                const Label l = grid.labels[flat];
                if (l == kFree) continue;
                store_u16(std::uint16_t(x), out);
                store_u16(std::uint16_t(y), out);
                store_u16(std::uint16_t(z), out);
                out.push_back(l);
                if (flow) {
                    store_f32(grid.flow[flat * 2], out);
                    store_f32(grid.flow[flat * 2 + 1], out);
                }
                if (vis) {
                    const std::uint8_t v = grid.visibility[flat];
                    if (v > 1)
                        throw Error("encode_occ: visibility must be 0 or 1");
                    out.push_back(v);
                }
            }
    return out;
}

VoxelGrid decode_occ(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kOcc1HeaderSize)
        throw Error("OCC1: file shorter than the 39-byte header");
    const std::uint8_t* p = bytes.data();
    if (std::memcmp(p, "OCC1", 4) != 0) throw Error("OCC1: bad magic");
    const std::uint16_t version = load_u16(p + 4);
    if (version != kOcc1Version)
        throw Error("OCC1: unsupported version " + std::to_string(version));
    const std::uint32_t dx = load_u32(p + 6);
    const std::uint32_t dy = load_u32(p + 10);
    const std::uint32_t dz = load_u32(p + 14);
    if (dx < 1 || dy < 1 || dz < 1) throw Error("OCC1: zero dimension");
    if (dx > 65536 || dy > 65536 || dz > 65536)
        throw Error("OCC1: dims exceed the u16 index range");
    const float res = load_f32(p + 18);
    if (!std::isfinite(res) || !(res > 0.0f))
        throw Error("OCC1: resolution must be finite and positive");
    const float ox = load_f32(p + 22), oy = load_f32(p + 26), oz = load_f32(p + 30);
    if (!std::isfinite(ox) || !std::isfinite(oy) || !std::isfinite(oz))
        throw Error("OCC1: origin must be finite");
    const std::uint8_t flags = p[34];
    if (flags & ~(kFlagFlow | kFlagVisibility))
        throw Error("OCC1: unknown flag bits set");
    const bool flow = flags & kFlagFlow;
    const bool vis = flags & kFlagVisibility;
    const std::uint32_t count = load_u32(p + 35);

    const std::size_t recsize = record_size(flow, vis);
    const std::uint64_t expected =
        std::uint64_t(kOcc1HeaderSize) + std::uint64_t(count) * recsize;
    if (std::uint64_t(bytes.size()) != expected)
        throw Error("OCC1: size " + std::to_string(bytes.size()) +
                    " does not match header (expected " + std::to_string(expected) +
                    " bytes)");
    const std::uint64_t voxels = std::uint64_t(dx) * dy * dz;
    if (count > voxels)
        throw Error("OCC1: record count exceeds the voxel count");

    GridSpec spec;
    spec.origin = {double(ox), double(oy), double(oz)};
    spec.resolution = double(res);
    spec.dims = {int(dx), int(dy), int(dz)};
    VoxelGrid grid(spec);
    if (flow) grid.enable_flow();
    if (vis) grid.enable_visibility(1);  // free voxels are not stored

    std::int64_t prev_flat = -1;
    const std::uint8_t* rec = p + kOcc1HeaderSize;
    for (std::uint32_t i = 0; i < count; ++i, rec += recsize) {
        const std::uint32_t x = load_u16(rec);
        const std::uint32_t y = load_u16(rec + 2);
        const std::uint32_t z = load_u16(rec + 4);
        if (x >= dx || y >= dy || z >= dz)
            throw Error("OCC1: record " + std::to_string(i) + " index out of range");
        const std::int64_t flat = (std::int64_t(z) * dy + y) * dx + x;
        if (flat <= prev_flat)
            throw Error("OCC1: record " + std::to_string(i) +
                        " breaks the strict (z, y, x) order");
        prev_flat = flat;
        const Label l = rec[6];
        if (!is_semantic(l) && l != kUnknown)
            throw Error("OCC1: record " + std::to_string(i) + " has invalid label " +
                        std::to_string(int(l)));
        grid.labels[std::size_t(flat)] = l;
        if (flow) {
            const float fx = load_f32(rec + 7), fy = load_f32(rec + 11);
            if (!std::isfinite(fx) || !std::isfinite(fy))
                throw Error("OCC1: record " + std::to_string(i) + " has non-finite flow");
            grid.flow[std::size_t(flat) * 2] = fx;
            grid.flow[std::size_t(flat) * 2 + 1] = fy;
        }
        if (vis) {
            const std::uint8_t v = rec[recsize - 1];
            if (v > 1)
                throw Error("OCC1: record " + std::to_string(i) +
                            " has visibility outside {0, 1}");
            grid.visibility[std::size_t(flat)] = v;
        }
    }
    return grid;
}

VoxelGrid read_occ(const std::string& path) {
    const auto bytes = read_file(path);
    try {
        return decode_occ(bytes);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_occ(const std::string& path, const VoxelGrid& grid) {
    write_file(path, encode_occ(grid));
}

}  // namespace occkit::io
