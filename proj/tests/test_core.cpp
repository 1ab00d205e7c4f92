#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "occkit/geometry.hpp"
#include "occkit/grid.hpp"
#include "occkit/kernels/feature_volume.hpp"
#include "occkit/trajectory.hpp"
#include "occkit/types.hpp"
#include "occkit/warp.hpp"

using namespace occkit;

namespace {

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
double sym(std::mt19937_64& rng, double a) { return (2.0 * unit(rng) - 1.0) * a; }

}  // namespace

TEST_CASE("labels: class table round trip") {
    for (int c = 1; c <= kNumClasses; ++c)
        CHECK(class_code(class_name(Label(c))) == Label(c));
    CHECK(std::string(class_name(kFree)) == "free");
    CHECK(std::string(class_name(kUnknown)) == "unknown");
    CHECK(class_code("bus") == 3);
    CHECK(class_code("car") == 4);
    CHECK(class_code("drivable_surface") == 11);
    CHECK_THROWS_AS(class_code("hovercraft"), Error);
    CHECK_THROWS_AS(class_name(Label(17)), Error);
}

TEST_CASE("world_to_voxel: default spec corners") {
    GridSpec g;
    auto a = world_to_voxel({-50.0, -50.0, -5.0}, g);
    REQUIRE(a.has_value());
    CHECK(*a == Index3{0, 0, 0});
    auto b = world_to_voxel({0.1, 0.2, -4.9}, g);
    REQUIRE(b.has_value());
    CHECK(*b == Index3{100, 100, 0});
    CHECK_FALSE(world_to_voxel({50.0, 0.0, 0.0}, g).has_value());
    CHECK_FALSE(world_to_voxel({0.0, 0.0, 3.0}, g).has_value());
    CHECK(world_to_voxel({49.999, 49.999, 2.999}, g).has_value());
}

TEST_CASE("voxel_center: default spec") {
    GridSpec g;
    const Vec3 c0 = voxel_center({0, 0, 0}, g);
    CHECK(c0.x == -49.75);
    CHECK(c0.y == -49.75);
    CHECK(c0.z == -4.75);
    const Vec3 c1 = voxel_center({199, 199, 15}, g);
    CHECK(c1.x == 49.75);
    CHECK(c1.y == 49.75);
    CHECK(c1.z == 2.75);
}

TEST_CASE("world_to_voxel of voxel_center is the identity everywhere") {
    GridSpec g;
    g.dims = {23, 17, 9};
    g.origin = {-3.25, 1.5, -2.0};
    g.resolution = 0.37;
    for (int z = 0; z < g.dims.z; ++z)
        for (int y = 0; y < g.dims.y; ++y)
            for (int x = 0; x < g.dims.x; ++x) {
                const auto idx = world_to_voxel(voxel_center({x, y, z}, g), g);
                REQUIRE(idx.has_value());
                CHECK(*idx == Index3{x, y, z});
            }
}

TEST_CASE("grid storage order is z-major, x fastest") {
    GridSpec g;
    g.dims = {4, 3, 2};
    CHECK(g.flat(0, 0, 0) == 0);
    CHECK(g.flat(1, 0, 0) == 1);
    CHECK(g.flat(0, 1, 0) == 4);
    CHECK(g.flat(0, 0, 1) == 12);
    CHECK(g.flat(3, 2, 1) == g.voxel_count() - 1);
}

TEST_CASE("quaternion: yaw round trip and rotation") {
    for (double y : {0.0, 0.5, -2.9, 3.1, -3.1}) {
        const Quat q = Quat::from_yaw(y);
        CHECK(std::fabs(wrap_angle(q.yaw() - y)) < 1e-12);
        CHECK(std::fabs(q.norm() - 1.0) < 1e-12);
    }
    const Quat quarter = Quat::from_yaw(M_PI / 2.0);
    const Vec3 r = quarter.rotate({1.0, 0.0, 0.0});
    CHECK(std::fabs(r.x) < 1e-12);
    CHECK(std::fabs(r.y - 1.0) < 1e-12);
}

TEST_CASE("transform_points: translation, identity, quarter turn") {
    PointCloud pc;
    pc.points = {{1.0, 0.0, 0.0}};
    Pose p;
    p.translation = {10.0, 0.0, 0.0};
    auto moved = transform_points(pc, p);
    CHECK(moved.points[0].x == 11.0);
    CHECK(moved.points[0].y == 0.0);

    auto same = transform_points(pc, Pose::identity());
    CHECK(same.points[0].x == 1.0);

    Pose turn;
    turn.rotation = Quat::from_yaw(M_PI / 2.0);
    auto turned = transform_points(pc, turn);
    CHECK(std::fabs(turned.points[0].x) < 1e-9);
    CHECK(std::fabs(turned.points[0].y - 1.0) < 1e-9);
}

TEST_CASE("transform_points: inverse round trip within 1e-9") {
    std::mt19937_64 rng(11);
    PointCloud pc;
    for (int i = 0; i < 200; ++i)
        pc.points.push_back({sym(rng, 40.0), sym(rng, 40.0), sym(rng, 5.0)});
    Pose p;
    p.translation = {sym(rng, 10.0), sym(rng, 10.0), sym(rng, 2.0)};
    p.rotation = Quat::from_yaw(sym(rng, 3.0));
    const auto back = transform_points(transform_points(pc, p), p.inverse());
    for (std::size_t i = 0; i < pc.size(); ++i) {
        CHECK(std::fabs(back.points[i].x - pc.points[i].x) < 1e-9);
        CHECK(std::fabs(back.points[i].y - pc.points[i].y) < 1e-9);
        CHECK(std::fabs(back.points[i].z - pc.points[i].z) < 1e-9);
    }
}

TEST_CASE("pose compose applies right-to-left") {
    std::mt19937_64 rng(5);
    Pose a, b;
    a.translation = {sym(rng, 5.0), sym(rng, 5.0), sym(rng, 5.0)};
    a.rotation = Quat::from_yaw(sym(rng, 3.0));
    b.translation = {sym(rng, 5.0), sym(rng, 5.0), sym(rng, 5.0)};
    b.rotation = Quat::from_yaw(sym(rng, 3.0));
    const Vec3 p{sym(rng, 3.0), sym(rng, 3.0), sym(rng, 3.0)};
    const Vec3 lhs = a.compose(b).apply(p);
    const Vec3 rhs = a.apply(b.apply(p));
    CHECK(std::fabs(lhs.x - rhs.x) < 1e-12);
    CHECK(std::fabs(lhs.y - rhs.y) < 1e-12);
    CHECK(std::fabs(lhs.z - rhs.z) < 1e-12);
}

TEST_CASE("point_in_box: boundaries and rotation") {
    Box3D box;
    box.size = {2.0, 2.0, 2.0};
    CHECK(point_in_box({0.9, 0.0, 0.0}, box));
    CHECK_FALSE(point_in_box({1.1, 0.0, 0.0}, box));

    Box3D rot;
    rot.size = {4.0, 2.0, 2.0};
    rot.yaw = M_PI / 2.0;
    CHECK(point_in_box({0.0, 1.9, 0.0}, rot));
    CHECK_FALSE(point_in_box({1.9, 0.0, 0.0}, rot));
}

TEST_CASE("point_in_box invariant under simultaneous rigid transform") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        Box3D box;
        box.center = {sym(rng, 10.0), sym(rng, 10.0), sym(rng, 2.0)};
        box.size = {0.5 + unit(rng) * 4.0, 0.5 + unit(rng) * 4.0, 0.5 + unit(rng) * 4.0};
        box.yaw = sym(rng, 3.0);
        box.label = 4;
        const Vec3 p{box.center.x + sym(rng, 3.0), box.center.y + sym(rng, 3.0),
                     box.center.z + sym(rng, 3.0)};
        Pose pose;
        pose.translation = {sym(rng, 8.0), sym(rng, 8.0), sym(rng, 2.0)};
        pose.rotation = Quat::from_yaw(sym(rng, 3.0));
        const bool before = point_in_box(p, box);
        const bool after = point_in_box(pose.apply(p), transform_box(pose, box));
        CHECK(before == after);
    }
}

TEST_CASE("transform_box rotates planar velocity with the frame") {
    Box3D box;
    box.center = {1.0, 0.0, 0.0};
    box.size = {2.0, 1.0, 1.0};
    box.velocity = {1.0, 0.0};
    box.label = 4;
    Pose pose;
    pose.rotation = Quat::from_yaw(M_PI / 2.0);
    const Box3D out = transform_box(pose, box);
    CHECK(std::fabs(out.center.x) < 1e-12);
    CHECK(std::fabs(out.center.y - 1.0) < 1e-12);
    CHECK(std::fabs(out.velocity.x) < 1e-12);
    CHECK(std::fabs(out.velocity.y - 1.0) < 1e-12);
    CHECK(std::fabs(wrap_angle(out.yaw - M_PI / 2.0)) < 1e-12);
}

TEST_CASE("interpolate_box: midpoint, shortest arc, and the pi seam") {
    Box3D a, b;
    a.size = b.size = {2.0, 1.0, 1.0};
    a.label = b.label = 4;
    a.center = {0.0, 0.0, 0.0};
    b.center = {2.0, 0.0, 0.0};
    const Box3D mid = interpolate_box(a, b, 0.5);
    CHECK(mid.center.x == 1.0);

    a.yaw = 0.0;
    b.yaw = M_PI / 2.0;
    CHECK(std::fabs(interpolate_box(a, b, 0.5).yaw - M_PI / 4.0) < 1e-12);

    a.yaw = 3.0;
    b.yaw = -3.0;
    const double seam = interpolate_box(a, b, 0.5).yaw;
    CHECK(std::fabs(std::fabs(seam) - M_PI) < 1e-9);
}

TEST_CASE("interpolate_box endpoints exact; yaw stays inside the short arc") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        Box3D a, b;
        a.size = b.size = {2.0, 1.0, 1.0};
        a.label = b.label = 4;
        a.yaw = sym(rng, 3.14);
        b.yaw = sym(rng, 3.14);
        CHECK(interpolate_box(a, b, 0.0).yaw == a.yaw);
        CHECK(interpolate_box(a, b, 1.0).yaw == b.yaw);
        const double t = unit(rng);
        const double mid = interpolate_box(a, b, t).yaw;
        const double full = angle_dist(a.yaw, b.yaw);
        CHECK(angle_dist(mid, a.yaw) <= full + 1e-12);
        CHECK(angle_dist(mid, b.yaw) <= full + 1e-12);
        const double half = interpolate_box(a, b, 0.5).yaw;
        CHECK(angle_dist(half, a.yaw) <= full / 2.0 + 1e-12);
        CHECK(angle_dist(half, b.yaw) <= full / 2.0 + 1e-12);
    }
}

TEST_CASE("wrap_angle and angle_dist") {
    CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
    CHECK(angle_dist(0.1, -0.1) == doctest::Approx(0.2));
    CHECK(angle_dist(3.0, -3.0) == doctest::Approx(2.0 * M_PI - 6.0));
}

TEST_CASE("trajectory validate and interpolate") {
    Trajectory t;
    t.samples = {{0.0, 0.0, 0.0, 0.0, 1.0}, {1.0, 1.0, 0.0, 0.0, 1.0},
                 {2.0, 2.0, 1.0, 0.5, 1.0}};
    t.validate();
    CHECK(t.end_time() == 2.0);
    const auto mid = t.interpolate(0.5);
    CHECK(mid.x == doctest::Approx(0.5));
    const auto q = t.interpolate(1.5);
    CHECK(q.x == doctest::Approx(1.5));
    CHECK(q.y == doctest::Approx(0.5));

    Trajectory bad;
    bad.samples = {{0.5, 0.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(bad.validate(), Error);
    Trajectory dup;
    dup.samples = {{0.0, 0, 0, 0, 0}, {0.0, 1, 0, 0, 0}};
    CHECK_THROWS_AS(dup.validate(), Error);
}

TEST_CASE("footprint_overlap matches a brute-force cell-center oracle") {
    std::mt19937_64 rng(31);
    BevSpec spec;
    spec.origin = {-8.0, -8.0};
    spec.resolution = 0.5;
    spec.dims_x = 32;
    spec.dims_y = 32;
    for (int trial = 0; trial < 60; ++trial) {
        BevGrid bev(spec);
        for (auto& c : bev.cells) c = (unit(rng) < 0.2) ? 1 : 0;
        const double x = sym(rng, 5.0), y = sym(rng, 5.0), h = sym(rng, 3.14);
        Footprint fp{1.0 + unit(rng) * 5.0, 0.5 + unit(rng) * 3.0};
        const int got = footprint_overlap(bev, x, y, h, fp);
        const double c = std::cos(h), s = std::sin(h);
        int want = 0;
        for (int cy = 0; cy < spec.dims_y; ++cy)
            for (int cx = 0; cx < spec.dims_x; ++cx) {
                if (!bev.at(cx, cy)) continue;
                const Vec2 cc = spec.cell_center(cx, cy);
                const double dx = cc.x - x, dy = cc.y - y;
                const double u = c * dx + s * dy, v = -s * dx + c * dy;
                if (std::fabs(u) <= fp.length * 0.5 && std::fabs(v) <= fp.width * 0.5)
                    ++want;
            }
        CHECK(got == want);
    }
}

TEST_CASE("warp_grid: identity pose is the identity") {
    GridSpec g;
    g.dims = {8, 8, 4};
    g.origin = {-2.0, -2.0, -1.0};
    VoxelGrid grid(g);
    std::mt19937_64 rng(3);
    for (auto& l : grid.labels)
        if (unit(rng) < 0.3) l = Label(1 + rng() % 16);
    const VoxelGrid out = warp_grid(grid, Pose::identity());
    CHECK(out.labels == grid.labels);
}

TEST_CASE("warp_grid: one-voxel translation shifts contents") {
    GridSpec g;
    g.dims = {6, 4, 2};
    g.origin = {0.0, 0.0, 0.0};
    g.resolution = 0.5;
    VoxelGrid grid(g);
    grid.at(2, 1, 0) = 4;
    Pose shift;
    shift.translation = {0.5, 0.0, 0.0};
    const VoxelGrid out = warp_grid(grid, shift);
    CHECK(out.at(3, 1, 0) == 4);
    CHECK(out.at(2, 1, 0) == kFree);
    for (int z = 0; z < 2; ++z)
        for (int y = 0; y < 4; ++y) CHECK(out.at(0, y, z) == kFree);
    CHECK(out.occupied_count() == 1);
}

TEST_CASE("warp_grid feature volume matches a per-cell reference resampler") {
    using kernels::FeatureVolume;
    std::mt19937_64 rng(41);
    FeatureVolume vol(5, 6, 7, 3);
    for (auto& v : vol.data) v = sym(rng, 2.0);
    Pose pose;
    pose.translation = {0.7, -0.4, 0.3};
    pose.rotation = Quat::from_yaw(0.37);
    const FeatureVolume out = warp_grid(vol, pose);
    const Pose inv = pose.inverse();
    for (int z = 0; z < vol.dim_z; ++z)
        for (int y = 0; y < vol.dim_y; ++y)
            for (int x = 0; x < vol.dim_x; ++x) {
                const Vec3 src = inv.apply({double(x), double(y), double(z)});
                for (int c = 0; c < vol.channels; ++c) {
                    double want = 0.0;
                    if (src.x >= 0 && src.x <= vol.dim_x - 1 && src.y >= 0 &&
                        src.y <= vol.dim_y - 1 && src.z >= 0 && src.z <= vol.dim_z - 1) {
                        // independent trilinear blend
                        const int x0 = std::min(int(std::floor(src.x)), vol.dim_x - 2);
                        const int y0 = std::min(int(std::floor(src.y)), vol.dim_y - 2);
                        const int z0 = std::min(int(std::floor(src.z)), vol.dim_z - 2);
                        const double fx = src.x - x0, fy = src.y - y0, fz = src.z - z0;
                        for (int dz = 0; dz < 2; ++dz)
                            for (int dy = 0; dy < 2; ++dy)
                                for (int dx = 0; dx < 2; ++dx) {
                                    const double w = (dz ? fz : 1 - fz) *
                                                     (dy ? fy : 1 - fy) *
                                                     (dx ? fx : 1 - fx);
                                    want += w * vol.cell(z0 + dz, y0 + dy, x0 + dx)[c];
                                }
                    }
                    CHECK(std::fabs(out.cell(z, y, x)[c] - want) < 1e-6);
                }
            }
}

TEST_CASE("warp_grid composition consistency on a smooth field") {
    using kernels::FeatureVolume;
    FeatureVolume vol(6, 8, 8, 1);
    for (int z = 0; z < 6; ++z)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                vol.cell(z, y, x)[0] = 0.05 * x + 0.04 * y + 0.03 * z + 1.0;
    Pose p1, p2;
    p1.translation = {0.25, 0.1, 0.0};
    p2.translation = {0.15, -0.2, 0.1};
    const FeatureVolume two_step = warp_grid(warp_grid(vol, p1), p2);
    const FeatureVolume one_step = warp_grid(vol, p2.compose(p1));
    // Compare away from the boundary where the intermediate zero-fill differs.
    for (int z = 2; z < 4; ++z)
        for (int y = 2; y < 6; ++y)
            for (int x = 2; x < 6; ++x)
                CHECK(std::fabs(two_step.cell(z, y, x)[0] - one_step.cell(z, y, x)[0]) <
                      1e-5);
}
