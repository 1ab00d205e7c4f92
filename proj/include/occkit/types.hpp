#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace occkit {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

struct Index3 {
    int x = 0, y = 0, z = 0;
    bool operator==(const Index3&) const = default;
};

// Semantic label codes. 0 is free space, 255 is unknown/ignore.
using Label = std::uint8_t;

inline constexpr Label kFree = 0;
inline constexpr Label kUnknown = 255;
inline constexpr int kNumClasses = 16;

// Fixed class table, codes 1..16.
inline constexpr std::array<const char*, kNumClasses> kClassNames = {
    "barrier",          "bicycle",    "bus",      "car",
    "construction_vehicle", "motorcycle", "pedestrian", "traffic_cone",
    "trailer",          "truck",      "drivable_surface", "other_flat",
    "sidewalk",         "terrain",    "manmade",  "vegetation",
};

inline const char* class_name(Label code) {
    if (code == kFree) return "free";
    if (code == kUnknown) return "unknown";
    if (code >= 1 && code <= kNumClasses) return kClassNames[code - 1];
    throw Error("invalid label code " + std::to_string(int(code)));
}

inline Label class_code(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (name == kClassNames[i]) return Label(i + 1);
    throw Error("unknown class name '" + name + "'");
}

inline bool is_semantic(Label code) { return code >= 1 && code <= kNumClasses; }

}  // namespace occkit
