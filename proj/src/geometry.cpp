#include "occkit/geometry.hpp"

#include <cmath>

namespace occkit {

Quat Quat::from_yaw(double yaw) {
    return {std::cos(yaw * 0.5), 0.0, 0.0, std::sin(yaw * 0.5)};
}

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw Error("Quat: zero norm");
    return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
}

Vec3 Quat::rotate(const Vec3& v) const {
    // v' = v + 2w(q x v) + 2(q x (q x v)), q = vector part
    const Vec3 q{x, y, z};
    const Vec3 t = q.cross(v) * 2.0;
    return v + t * w + q.cross(t);
}

double Quat::yaw() const {
    return std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
}

void Pose::validate() const {
    if (!translation.finite()) throw Error("Pose: non-finite translation");
    const double n = rotation.norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw Error("Pose: quaternion norm " + std::to_string(n) + " not within tolerance of 1");
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation = rotation.conjugate();
    inv.translation = inv.rotation.rotate(translation * -1.0);
    inv.timestamp_us = timestamp_us;
    return inv;
}

Pose Pose::compose(const Pose& other) const {
    Pose out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation.rotate(other.translation) + translation;
    out.timestamp_us = other.timestamp_us;
    return out;
}

void Box3D::validate() const {
    if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0))
        throw Error("Box3D: size components must be positive");
    if (!center.finite() || !std::isfinite(yaw)) throw Error("Box3D: non-finite pose");
}

Vec3 Box3D::to_body(const Vec3& p) const {
    const Vec3 d = p - center;
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

Vec3 Box3D::to_world(const Vec3& p_body) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * p_body.x - s * p_body.y + center.x,
            s * p_body.x + c * p_body.y + center.y, p_body.z + center.z};
}

PointCloud transform_points(const PointCloud& pc, const Pose& pose) {
    PointCloud out = pc;
    for (auto& p : out.points) p = pose.apply(p);
    return out;
}

bool point_in_box(const Vec3& p, const Box3D& box) {
    const Vec3 b = box.to_body(p);
    return std::abs(b.x) <= box.size.x * 0.5 && std::abs(b.y) <= box.size.y * 0.5 &&
           std::abs(b.z) <= box.size.z * 0.5;
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

double angle_dist(double a, double b) { return std::abs(wrap_angle(a - b)); }

static double lerp_yaw(double a, double b, double t) {
    const double ax = std::cos(a), ay = std::sin(a);
    const double bx = std::cos(b), by = std::sin(b);
    const double vx = (1.0 - t) * ax + t * bx;
    const double vy = (1.0 - t) * ay + t * by;
    const double n = std::hypot(vx, vy);
    if (n < 1e-12) {
        // Antipodal endpoints: the arc direction is ambiguous, go through +pi.
        return wrap_angle(a + t * M_PI);
    }
    return std::atan2(vy, vx);
}

Box3D interpolate_box(const Box3D& a, const Box3D& b, double t) {
    if (a.track_id != b.track_id)
        throw Error("interpolate_box: track_id mismatch (" + std::to_string(a.track_id) +
                    " vs " + std::to_string(b.track_id) + ")");
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    Box3D out = a;
    const double u = 1.0 - t;
    out.center = a.center * u + b.center * t;
    out.size = a.size * u + b.size * t;
    out.velocity = a.velocity * u + b.velocity * t;
    out.yaw = lerp_yaw(a.yaw, b.yaw, t);
    out.timestamp_us =
        std::int64_t(std::llround(u * double(a.timestamp_us) + t * double(b.timestamp_us)));
    return out;
}

Box3D transform_box(const Pose& pose, const Box3D& box) {
    Box3D out = box;
    out.center = pose.apply(box.center);
    const double dyaw = pose.rotation.yaw();
    out.yaw = wrap_angle(box.yaw + dyaw);
    const double c = std::cos(dyaw), s = std::sin(dyaw);
    out.velocity = {c * box.velocity.x - s * box.velocity.y,
                    s * box.velocity.x + c * box.velocity.y};
    return out;
}

}  // namespace occkit
