#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "occkit/planner.hpp"
#include "occkit/synth.hpp"

using namespace occkit;
using namespace occkit::planner;

namespace {

BevSpec small_bev() {
    BevSpec s;
    s.origin = {-8.0, -8.0};
    s.resolution = 0.5;
    s.dims_x = 32;
    s.dims_y = 32;
    return s;
}

SamplerConfig fixed_params(double v0, double accel, double kappa) {
    SamplerConfig cfg;
    cfg.count = 1;
    cfg.v0_min = cfg.v0_max = v0;
    cfg.accel_min = cfg.accel_max = accel;
    cfg.kappa_min = cfg.kappa_max = kappa;
    return cfg;
}

Trajectory straight(double speed, int n = 13, double dt = 0.25) {
    Trajectory t;
    for (int i = 0; i < n; ++i)
        t.samples.push_back({i * dt, speed * i * dt, 0.0, 0.0, speed});
    return t;
}

// Explicit-Euler integration of the same motion model on a fine step.
Trajectory integrate_reference(double v0, double accel, double kappa, double horizon,
                               double dt) {
    Trajectory out;
    const double h = 1e-5;
    double x = 0.0, y = 0.0, theta = 0.0;
    double t = 0.0;
    int next = 0;
    const int steps = int(std::llround(horizon / dt));
    for (int i = 0; next <= steps; ++i) {
        t = i * h;
        if (t >= next * dt - h * 0.5) {
            const double v = std::max(0.0, v0 + accel * (next * dt));
            out.samples.push_back({next * dt, x, y, theta, v});
            ++next;
        }
        const double v = std::max(0.0, v0 + accel * t);
        x += v * std::cos(theta) * h;
        y += v * std::sin(theta) * h;
        theta += kappa * v * h;
    }
    return out;
}

}  // namespace

TEST_CASE("sample_trajectories: degenerate ranges give exact arcs") {
    const TrajectorySet still = sample_trajectories(fixed_params(0.0, 0.0, 0.0));
    REQUIRE(still.trajectories.size() == 1);
    for (const auto& s : still.trajectories[0].samples) {
        CHECK(s.x == 0.0);
        CHECK(s.y == 0.0);
        CHECK(s.speed == 0.0);
    }

    const TrajectorySet unit = sample_trajectories(fixed_params(1.0, 0.0, 0.0));
    const Trajectory& tr = unit.trajectories[0];
    REQUIRE(tr.samples.size() == 13);
    CHECK(tr.endpoint().x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(tr.endpoint().y == 0.0);
    CHECK(tr.endpoint().heading == 0.0);
    for (const auto& s : tr.samples) CHECK(s.x == doctest::Approx(s.t).epsilon(1e-12));
}

TEST_CASE("sample_trajectories matches a fine-step integrator") {
    const double cases[][3] = {
        {2.0, 0.0, 0.1}, {4.0, 1.0, -0.15}, {6.0, -1.5, 0.05}, {1.0, 2.0, 0.2}};
    for (const auto& c : cases) {
        const TrajectorySet set = sample_trajectories(fixed_params(c[0], c[1], c[2]));
        const Trajectory& got = set.trajectories[0];
        const Trajectory ref = integrate_reference(c[0], c[1], c[2], 3.0, 0.25);
        REQUIRE(got.samples.size() == ref.samples.size());
        for (std::size_t i = 0; i < got.samples.size(); ++i) {
            CHECK(std::fabs(got.samples[i].x - ref.samples[i].x) < 1e-3);
            CHECK(std::fabs(got.samples[i].y - ref.samples[i].y) < 1e-3);
            CHECK(std::fabs(got.samples[i].heading - ref.samples[i].heading) < 1e-3);
        }
        // heading growth is exact for constant curvature and acceleration
        for (std::size_t i = 0; i < got.samples.size(); ++i) {
            const double t = got.samples[i].t;
            const double stopped = c[1] < 0.0 ? -c[0] / c[1] : 1e9;
            const double tt = std::min(t, stopped);
            const double arc = c[0] * tt + 0.5 * c[1] * tt * tt;
            CHECK(got.samples[i].heading == doctest::Approx(c[2] * arc).epsilon(1e-9));
        }
    }
}

TEST_CASE("sample_trajectories: stop clamp holds position") {
    const TrajectorySet set = sample_trajectories(fixed_params(1.0, -2.0, 0.0));
    const Trajectory& tr = set.trajectories[0];
    // v hits zero at t = 0.5 after 0.25 m
    for (const auto& s : tr.samples)
        if (s.t >= 0.5) {
            CHECK(s.x == doctest::Approx(0.25).epsilon(1e-12));
            CHECK(s.speed == 0.0);
        }
}

TEST_CASE("sample_trajectories: determinism and stratified coverage") {
    SamplerConfig cfg;
    cfg.count = 64;
    cfg.seed = 9;
    const TrajectorySet a = sample_trajectories(cfg);
    const TrajectorySet b = sample_trajectories(cfg);
    REQUIRE(a.trajectories.size() == 64);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(a.params[i].v0 == b.params[i].v0);
        CHECK(a.params[i].accel == b.params[i].accel);
        CHECK(a.params[i].kappa == b.params[i].kappa);
    }
    cfg.seed = 10;
    const TrajectorySet c = sample_trajectories(cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < 64; ++i)
        if (c.params[i].v0 != a.params[i].v0) any_diff = true;
    CHECK(any_diff);

    // 64 = 4 x 4 x 4 lattice, one draw inside each cell
    const double wv = (cfg.v0_max - cfg.v0_min) / 4.0;
    const double wa = (cfg.accel_max - cfg.accel_min) / 4.0;
    const double wk = (cfg.kappa_max - cfg.kappa_min) / 4.0;
    for (std::size_t i = 0; i < 64; ++i) {
        const std::size_t iv = i / 16, ia = (i / 4) % 4, ik = i % 4;
        CHECK(a.params[i].v0 >= cfg.v0_min + double(iv) * wv);
        CHECK(a.params[i].v0 <= cfg.v0_min + double(iv + 1) * wv);
        CHECK(a.params[i].accel >= cfg.accel_min + double(ia) * wa);
        CHECK(a.params[i].accel <= cfg.accel_min + double(ia + 1) * wa);
        CHECK(a.params[i].kappa >= cfg.kappa_min + double(ik) * wk);
        CHECK(a.params[i].kappa <= cfg.kappa_min + double(ik + 1) * wk);
    }
}

TEST_CASE("sampler config faults") {
    SamplerConfig cfg;
    cfg.count = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SamplerConfig{};
    cfg.dt = 0.7;  // does not divide 3 s
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = SamplerConfig{};
    cfg.v0_min = 5.0;
    cfg.v0_max = 1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(SamplerConfig{}.steps() == 12);
}

TEST_CASE("classify_command thresholds on endpoint lateral offset") {
    Trajectory fwd = straight(1.0);
    CHECK(classify_command(fwd, 2.0) == CommandKind::forward);

    Trajectory left = straight(1.0);
    left.samples.back().y = 3.0;
    CHECK(classify_command(left, 1.0) == CommandKind::turn_left);

    Trajectory slight = straight(1.0);
    slight.samples.back().y = -0.5;
    CHECK(classify_command(slight, 1.0) == CommandKind::forward);
    slight.samples.back().y = -1.5;
    CHECK(classify_command(slight, 1.0) == CommandKind::turn_right);
}

TEST_CASE("safety_cost counts footprint overlap per sample") {
    const BevSpec bs = small_bev();
    BevGrid empty(bs);
    const Footprint fp{4.1, 1.8};

    Trajectory park;
    park.samples.push_back({0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(safety_cost(park, empty, fp, 1.0) == 0.0);

    BevGrid block(bs);
    int inside = 0;
    for (int y = 14; y < 18; ++y)
        for (int x = 14; x < 18; ++x) {
            block.at(x, y) = 1;
            const Vec2 c = bs.cell_center(x, y);
            if (std::fabs(c.x) <= 2.05 && std::fabs(c.y) <= 0.9) ++inside;
        }
    REQUIRE(inside > 0);
    CHECK(safety_cost(park, block, fp, 1.0) == double(inside));
    CHECK(safety_cost(park, block, fp, 2.0) == double(inside) / 2.0);

    // every sample tallies independently
    Trajectory two = park;
    two.samples.push_back({0.25, 0.0, 0.0, 0.0, 0.0});
    CHECK(safety_cost(two, block, fp, 1.0) == 2.0 * inside);
}

TEST_CASE("comfort_cost: analytic values for constant arcs") {
    const TrajectorySet cruise = sample_trajectories(fixed_params(2.0, 0.0, 0.0));
    CHECK(comfort_cost(cruise.trajectories[0]) == 0.0);

    const double v = 2.0, k = 0.1;
    const TrajectorySet arc = sample_trajectories(fixed_params(v, 0.0, k));
    const double expect = k * k * v * v * v * v;
    CHECK(comfort_cost(arc.trajectories[0]) == doctest::Approx(expect).epsilon(1e-9));

    const TrajectorySet arc2 = sample_trajectories(fixed_params(v, 0.0, 2.0 * k));
    CHECK(comfort_cost(arc2.trajectories[0]) ==
          doctest::Approx(4.0 * expect).epsilon(1e-9));
}

TEST_CASE("progress_cost is negative forward displacement") {
    CHECK(progress_cost(straight(0.0)) == 0.0);
    CHECK(progress_cost(straight(1.0)) == doctest::Approx(-3.0));
    CHECK(progress_cost(straight(2.0)) < progress_cost(straight(1.0)));
}

TEST_CASE("select_trajectory: argmin, ties, feasibility, scaling") {
    const BevSpec bs = small_bev();
    BevGrid wall(bs);
    for (int y = 0; y < 32; ++y)
        for (int x = 22; x < 26; ++x) wall.at(x, y) = 1;

    TrajectorySet set;
    set.trajectories.push_back(straight(2.0));  // runs into the wall
    set.trajectories.push_back(straight(0.2));  // nose stays short of it
    set.params.resize(2);
    Command cmd;
    CostWeights w;
    w.safety = 1000.0;
    w.norm_occupancy = 1.0;
    const Footprint fp{4.1, 1.8};

    CostReport rep;
    const Trajectory sel =
        select_trajectory(set, wall, cmd, w, fp, BevSource::occupancy, &rep);
    CHECK(rep.selected == 1);
    CHECK(sel.endpoint().x == doctest::Approx(0.6));
    REQUIRE(rep.candidates.size() == 2);
    CHECK(rep.candidates[0].safety > 0.0);
    CHECK(rep.candidates[1].safety == 0.0);
    CHECK(rep.normalization == 1.0);

    // scaling every weight preserves the argmin
    CostWeights scaled = w;
    scaled.safety *= 7.0;
    scaled.comfort *= 7.0;
    scaled.progress *= 7.0;
    CostReport rep2;
    select_trajectory(set, wall, cmd, scaled, fp, BevSource::occupancy, &rep2);
    CHECK(rep2.selected == rep.selected);

    // exact tie takes the lower index
    TrajectorySet twins;
    twins.trajectories.push_back(straight(1.0));
    twins.trajectories.push_back(straight(1.0));
    twins.params.resize(2);
    CostReport rep3;
    select_trajectory(twins, wall, cmd, w, fp, BevSource::occupancy, &rep3);
    CHECK(rep3.selected == 0);

    // no candidate matches the command
    Command left;
    left.kind = CommandKind::turn_left;
    CHECK_THROWS_AS(
        select_trajectory(set, wall, left, w, fp, BevSource::occupancy, nullptr),
        NoFeasibleCandidate);

    // a matching turn candidate excludes the straight ones
    TrajectorySet mixed = set;
    Trajectory turner = straight(0.5);
    for (auto& s : turner.samples) s.y = s.t * 1.5;
    mixed.trajectories.push_back(turner);
    mixed.params.resize(3);
    CostReport rep4;
    select_trajectory(mixed, wall, left, w, fp, BevSource::occupancy, &rep4);
    CHECK(rep4.selected == 2);
    CHECK(rep4.candidates.size() == 1);
}

TEST_CASE("squeeze_to_bev: column squash with class filters") {
    GridSpec g;
    g.origin = {-8.0, -8.0, -2.0};
    g.resolution = 0.5;
    g.dims = {32, 32, 8};
    VoxelGrid grid(g);
    grid.at(5, 7, 3) = 4;
    grid.at(20, 20, 0) = 16;

    const BevGrid all = squeeze_to_bev(grid, {});
    CHECK(all.at(5, 7) == 1);
    CHECK(all.at(20, 20) == 1);
    CHECK(all.occupied_count() == 2);

    const BevGrid cars = squeeze_to_bev(grid, {4});
    CHECK(cars.at(5, 7) == 1);
    CHECK(cars.at(20, 20) == 0);

    // growing the keep set never clears cells
    const BevGrid more = squeeze_to_bev(grid, {4, 16});
    for (std::size_t i = 0; i < cars.cells.size(); ++i)
        CHECK(more.cells[i] >= cars.cells[i]);

    CHECK(squeeze_to_bev(VoxelGrid(g), {}).occupied_count() == 0);
    CHECK_THROWS_AS(squeeze_to_bev(grid, {kFree}), Error);
    CHECK_THROWS_AS(squeeze_to_bev(grid, {kUnknown}), Error);
}

TEST_CASE("boxes_to_bev: footprint containment against the direct rule") {
    const BevSpec bs = small_bev();
    Box3D cube;
    cube.center = {0.0, 0.0, 0.0};
    cube.size = {1.0, 1.0, 1.0};
    cube.label = 4;
    const BevGrid four = boxes_to_bev({cube}, bs, {});
    CHECK(four.occupied_count() == 4);

    CHECK(boxes_to_bev({}, bs, {}).occupied_count() == 0);
    CHECK(boxes_to_bev({cube}, bs, {10}).occupied_count() == 0);

    std::mt19937_64 rng(77);
    const auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 25; ++trial) {
        Box3D b;
        b.center = {unit() * 8.0 - 4.0, unit() * 8.0 - 4.0, 0.0};
        b.size = {0.5 + unit() * 4.0, 0.5 + unit() * 2.0, 1.0};
        b.yaw = unit() * 6.283185307;
        b.label = 4;
        const BevGrid got = boxes_to_bev({b}, bs, {});
        const double hl = b.size.x * 0.5, hw = b.size.y * 0.5;
        const double c = std::cos(b.yaw), s = std::sin(b.yaw);
        for (int y = 0; y < bs.dims_y; ++y)
            for (int x = 0; x < bs.dims_x; ++x) {
                const Vec2 cc = bs.cell_center(x, y);
                const double dx = cc.x - b.center.x, dy = cc.y - b.center.y;
                const double u = c * dx + s * dy, v = -s * dx + c * dy;
                const bool want = std::fabs(u) <= hl && std::fabs(v) <= hw;
                CHECK(got.at(x, y) == (want ? 1 : 0));
            }
    }
}

TEST_CASE("plan_from_grid: free space plans fast, obstacles are avoided") {
    GridSpec g;
    g.origin = {-8.0, -8.0, -2.0};
    g.resolution = 0.5;
    g.dims = {32, 32, 8};
    SamplerConfig sampler;
    sampler.count = 27;
    sampler.v0_max = 3.0;
    Command cmd;
    CostWeights w;
    w.safety = 1000.0;
    w.norm_occupancy = 1.0;
    w.norm_boxes = 1.0;
    const Footprint fp{4.1, 1.8};

    const PlanResult free_plan = plan_from_grid(VoxelGrid(g), {}, cmd, sampler, w, fp);
    CHECK(free_plan.report.selected >= 0);
    CHECK(free_plan.bev.occupied_count() == 0);
    // every candidate is safe; verify the argmin over the reported totals
    double best = free_plan.report.candidates[0].total;
    int best_idx = free_plan.report.candidates[0].index;
    for (const auto& c : free_plan.report.candidates) {
        CHECK(c.safety == 0.0);
        if (c.total < best) {
            best = c.total;
            best_idx = c.index;
        }
    }
    CHECK(free_plan.report.selected == best_idx);
    CHECK(free_plan.trajectory.endpoint().x > 0.0);

    // vegetation ahead blocks the straight line under the full keep set
    VoxelGrid field(g);
    for (int y = 0; y < 32; ++y)
        for (int z = 0; z < 8; ++z)
            for (int x = 22; x < 26; ++x) field.at(x, y, z) = 16;
    const PlanResult blocked = plan_from_grid(field, {}, cmd, sampler, w, fp);
    CHECK(safety_cost(blocked.trajectory, blocked.bev, fp, 1.0) == 0.0);
    CHECK(blocked.report.source == BevSource::occupancy);
    CHECK(blocked.report.normalization == 1.0);

    // the vehicle keep set ignores vegetation entirely
    const PlanResult ignore =
        plan_from_grid(field, vehicle_pedestrian_classes(), cmd, sampler, w, fp);
    CHECK(ignore.bev.occupied_count() == 0);
}

TEST_CASE("plan_from_boxes mirrors the grid planner on box input") {
    const BevSpec bs = small_bev();
    Box3D blocker;
    blocker.center = {4.0, 0.0, 0.0};
    blocker.size = {2.0, 12.0, 1.0};
    blocker.label = 10;
    SamplerConfig sampler;
    sampler.count = 27;
    sampler.v0_max = 3.0;
    Command cmd;
    CostWeights w;
    w.safety = 1000.0;
    w.norm_occupancy = 1.0;
    w.norm_boxes = 1.0;
    const Footprint fp{4.1, 1.8};
    const PlanResult res = plan_from_boxes({blocker}, bs, {}, cmd, sampler, w, fp);
    CHECK(res.report.source == BevSource::boxes);
    CHECK(res.bev.occupied_count() > 0);
    CHECK(safety_cost(res.trajectory, res.bev, fp, 1.0) == 0.0);
}

TEST_CASE("vehicle and pedestrian class set") {
    const auto& classes = vehicle_pedestrian_classes();
    const std::vector<Label> want = {2, 3, 4, 5, 6, 7, 9, 10};
    CHECK(classes == want);
}
