#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/occgen.hpp"
#include "occkit/types.hpp"

namespace occkit::io {

// Points file: consecutive little-endian f32 records (x, y, z, intensity),
// 16 bytes each. Labels, when present, live in a sidecar at path + ".labels"
// holding one u8 per point.
PointCloud read_points(const std::string& path);
void write_points(const std::string& path, const PointCloud& cloud);

// Occupancy container, magic "OCC1". Little-endian layout:
//   magic 4B | version u16 | dims 3xu32 (x,y,z) | resolution f32 |
//   origin 3xf32 | flags u8 | record_count u32
// then record_count records sorted strictly by (z, y, x):
//   x u16, y u16, z u16, label u8 [, fx f32, fy f32] [, visible u8]
// flags bit0 = flow fields present, bit1 = visible field present; all other
// bits must be zero. Free voxels are omitted, so labels are 1..16 or 255.
// Free-voxel visibility is not representable and reads back as visible.
inline constexpr std::size_t kOcc1HeaderSize = 39;
inline constexpr std::uint16_t kOcc1Version = 1;

VoxelGrid read_occ(const std::string& path);
void write_occ(const std::string& path, const VoxelGrid& grid);

// Same validation and codec paths as the file variants; used by the fuzz
// and determinism harnesses to avoid disk churn.
VoxelGrid decode_occ(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_occ(const VoxelGrid& grid);

// Scene manifest: one JSON document listing frames in time order. Point
// file paths are resolved relative to the manifest's directory. Class names
// come from the fixed 16-entry table.
std::vector<occgen::Frame> read_manifest(const std::string& path);

// Writes manifest.json plus one points file per frame into dir. Returns the
// manifest path. Re-reading reproduces the frames (poses, boxes, cameras,
// clouds) exactly.
std::string write_manifest(const std::string& dir,
                           const std::vector<occgen::Frame>& frames);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace occkit::io
