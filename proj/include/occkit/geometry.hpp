#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occkit/types.hpp"

namespace occkit {

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quat from_yaw(double yaw);
    double norm() const;
    Quat normalized() const;
    Quat conjugate() const { return {w, -x, -y, -z}; }
    Quat operator*(const Quat& o) const;
    Vec3 rotate(const Vec3& v) const;
    double yaw() const;
};

// Rigid transform: p' = R p + t. Timestamps are microseconds.
struct Pose {
    Vec3 translation{};
    Quat rotation{};
    std::int64_t timestamp_us = 0;

    static Pose identity() { return Pose{}; }
    void validate() const;

    Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }
    Pose inverse() const;
    // Composition: (a.compose(b)).apply(p) == a.apply(b.apply(p)).
    Pose compose(const Pose& other) const;
};

// Oriented box. size holds full extents (length, width, height) along the
// body x/y/z axes; body x points along the heading.
struct Box3D {
    Vec3 center{};
    Vec3 size{1.0, 1.0, 1.0};
    double yaw = 0.0;
    Vec2 velocity{};
    Label label = kFree;
    std::uint64_t track_id = 0;
    std::int64_t timestamp_us = 0;

    void validate() const;
    // Transform a world point into the box body frame.
    Vec3 to_body(const Vec3& p) const;
    Vec3 to_world(const Vec3& p_body) const;
};

enum class PointFrame { sensor, ego, world, body };

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Label> labels;  // empty or same length as points
    std::vector<float> intensity;  // empty or same length as points
    std::int64_t timestamp_us = 0;
    PointFrame frame = PointFrame::sensor;

    void validate() const {
        if (!labels.empty() && labels.size() != points.size())
            throw Error("PointCloud: label count does not match point count");
        if (!intensity.empty() && intensity.size() != points.size())
            throw Error("PointCloud: intensity count does not match point count");
    }
    std::size_t size() const { return points.size(); }
};

PointCloud transform_points(const PointCloud& pc, const Pose& pose);
bool point_in_box(const Vec3& p, const Box3D& box);

// Re-express a box (and its planar velocity) in another frame. Boxes are
// yaw-oriented, so the pose rotation must be about z for the result to be
// exact; vehicle ego poses satisfy this.
Box3D transform_box(const Pose& pose, const Box3D& box);

// Linear interpolation between two key-frame boxes of the same track. Yaw
// follows the shortest arc (2D unit-vector blend, renormalized), so angles
// interpolate correctly across the +-pi seam.
Box3D interpolate_box(const Box3D& a, const Box3D& b, double t);

double wrap_angle(double a);          // into (-pi, pi]
double angle_dist(double a, double b);  // shortest arc distance, [0, pi]

}  // namespace occkit
