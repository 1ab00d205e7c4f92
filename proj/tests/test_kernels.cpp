#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "occkit/kernels/camera.hpp"
#include "occkit/kernels/cascade.hpp"
#include "occkit/kernels/deform_attn.hpp"
#include "occkit/kernels/losses.hpp"
#include "occkit/kernels/selftest.hpp"
#include "occkit/kernels/trilinear.hpp"
#include "occkit/types.hpp"

using namespace occkit;
using namespace occkit::kernels;

namespace {

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
double sym(std::mt19937_64& rng, double a) { return (2.0 * unit(rng) - 1.0) * a; }

FeatureVolume random_volume(std::mt19937_64& rng, int z, int y, int x, int c) {
    FeatureVolume vol(z, y, x, c);
    for (auto& v : vol.data) v = sym(rng, 2.0);
    return vol;
}

}  // namespace

TEST_CASE("trilinear: constant field, lattice points, affine reproduction") {
    FeatureVolume vol(3, 3, 3, 2);
    for (std::size_t i = 0; i < vol.data.size(); i += 2) {
        vol.data[i] = 7.5;
        vol.data[i + 1] = -1.25;
    }
    for (double t : {0.0, 0.3, 1.7, 2.0}) {
        const auto s = trilinear_sample(vol, {t, t, t});
        CHECK(s[0] == doctest::Approx(7.5).epsilon(1e-14));
        CHECK(s[1] == doctest::Approx(-1.25).epsilon(1e-14));
    }

    std::mt19937_64 rng(3);
    FeatureVolume rv = random_volume(rng, 4, 4, 4, 3);
    const auto lattice = trilinear_sample(rv, {2.0, 1.0, 3.0});
    for (int c = 0; c < 3; ++c) CHECK(lattice[std::size_t(c)] == rv.cell(2, 1, 3)[c]);

    FeatureVolume affine(4, 4, 4, 1);
    for (int z = 0; z < 4; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) affine.cell(z, y, x)[0] = 2.0 * x + 3.0 * y - z;
    for (int i = 0; i < 50; ++i) {
        const VolPos p{unit(rng) * 3.0, unit(rng) * 3.0, unit(rng) * 3.0};
        const auto s = trilinear_sample(affine, p);
        CHECK(std::fabs(s[0] - (2.0 * p.x + 3.0 * p.y - p.z)) < 1e-12);
    }
}

TEST_CASE("trilinear: border clamp outside the volume") {
    std::mt19937_64 rng(5);
    FeatureVolume vol = random_volume(rng, 3, 3, 3, 1);
    const auto corner = trilinear_sample(vol, {-3.0, -1.0, -0.5});
    CHECK(corner[0] == vol.cell(0, 0, 0)[0]);
    const auto far = trilinear_sample(vol, {9.0, 9.0, 9.0});
    CHECK(far[0] == vol.cell(2, 2, 2)[0]);
}

TEST_CASE("trilinear agrees with the naive oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        FeatureVolume vol = random_volume(rng, 2 + int(rng() % 5), 2 + int(rng() % 5),
                                          2 + int(rng() % 5), 1 + int(rng() % 4));
        const VolPos p{unit(rng) * (vol.dim_z - 1), unit(rng) * (vol.dim_y - 1),
                       unit(rng) * (vol.dim_x - 1)};
        const auto got = trilinear_sample(vol, p);
        const auto want = oracle::trilinear(vol, p);
        for (std::size_t c = 0; c < got.size(); ++c)
            CHECK(std::fabs(got[c] - want[c]) < 1e-12);
    }
}

TEST_CASE("trilinear continuity bound") {
    std::mt19937_64 rng(11);
    FeatureVolume vol = random_volume(rng, 4, 4, 4, 1);
    double max_diff = 0.0;
    for (std::size_t i = 0; i + 1 < vol.data.size(); ++i)
        max_diff = std::max(max_diff, std::fabs(vol.data[i] - vol.data[i + 1]));
    // Lipschitz constant along each axis is bounded by the largest adjacent
    // difference; use 3x for the diagonal.
    for (int i = 0; i < 200; ++i) {
        const VolPos p{unit(rng) * 3.0, unit(rng) * 3.0, unit(rng) * 3.0};
        const double d = 1e-4;
        const VolPos q{std::min(p.z + d, 3.0), std::min(p.y + d, 3.0),
                       std::min(p.x + d, 3.0)};
        const double fp = trilinear_sample(vol, p)[0];
        const double fq = trilinear_sample(vol, q)[0];
        CHECK(std::fabs(fp - fq) <= 3.0 * max_diff * d * std::sqrt(3.0) + 1e-12);
    }
}

TEST_CASE("attention: identity configuration reduces to trilinear") {
    std::mt19937_64 rng(13);
    FeatureVolume vol = random_volume(rng, 3, 3, 3, 4);
    DeformAttnParams p;
    p.heads = 1;
    p.points = 1;
    p.channels = 4;
    p.value_proj = {std::vector<double>(16, 0.0)};
    p.output_proj = {std::vector<double>(16, 0.0)};
    for (int i = 0; i < 4; ++i) {
        p.value_proj[0][std::size_t(i) * 4 + i] = 1.0;
        p.output_proj[0][std::size_t(i) * 4 + i] = 1.0;
    }
    p.attention_weights = {1.0};
    p.offsets = {{0.0, 0.0, 0.0}};
    const VolPos pos{1.3, 0.7, 1.9};
    const auto got = deformable_attention_3d({}, pos, vol, p);
    const auto want = trilinear_sample(vol, pos);
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::fabs(got[c] - want[c]) < 1e-12);
}

TEST_CASE("attention: equal-weight two-point convex blend") {
    FeatureVolume vol(1, 1, 3, 2);
    vol.cell(0, 0, 0)[0] = 2.0;
    vol.cell(0, 0, 0)[1] = 4.0;
    vol.cell(0, 0, 2)[0] = 6.0;
    vol.cell(0, 0, 2)[1] = 8.0;
    DeformAttnParams p;
    p.heads = 1;
    p.points = 2;
    p.channels = 2;
    p.value_proj = {{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}};
    p.output_proj = {{1.0, 0.0, 0.0, 1.0}};
    p.attention_weights = {0.5, 0.5};
    p.offsets = {{0.0, 0.0, 0.0}, {0.0, 0.0, 2.0}};
    const auto got = deformable_attention_3d({}, {0.0, 0.0, 0.0}, vol, p);
    CHECK(got[0] == doctest::Approx(4.0));
    CHECK(got[1] == doctest::Approx(6.0));
}

TEST_CASE("attention matches the naive oracle on random instances") {
    std::mt19937_64 rng(17);
    const int m_choices[] = {1, 2, 4};
    const int k_choices[] = {1, 4, 8};
    for (int trial = 0; trial < 60; ++trial) {
        const int m = m_choices[rng() % 3];
        const int k = k_choices[rng() % 3];
        const int c = m * (1 + int(rng() % (16 / m)));
        FeatureVolume vol = random_volume(rng, 2 + int(rng() % 7), 2 + int(rng() % 7),
                                          2 + int(rng() % 7), c);
        DeformAttnParams p = make_random_attn_params(m, k, c, 1, rng());
        const VolPos pos{unit(rng) * (vol.dim_z - 1), unit(rng) * (vol.dim_y - 1),
                         unit(rng) * (vol.dim_x - 1)};
        const auto got = deformable_attention_3d({}, pos, vol, p);
        const auto want = oracle::attention(pos, vol, p, 0);
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double denom = std::max({std::fabs(got[i]), std::fabs(want[i]), 1e-8});
            CHECK(std::fabs(got[i] - want[i]) / denom < 1e-6);
        }
    }
}

TEST_CASE("attention faults carry context") {
    std::mt19937_64 rng(19);
    FeatureVolume vol = random_volume(rng, 2, 2, 2, 4);
    DeformAttnParams p = make_random_attn_params(2, 2, 4, 1, 23);
    p.attention_weights[0] = 0.9;  // breaks the head-0 sum
    try {
        deformable_attention_3d({}, {0.5, 0.5, 0.5}, vol, p);
        FAIL("expected a fault");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("head") != std::string::npos);
    }

    DeformAttnParams bad = make_random_attn_params(2, 2, 4, 1, 29);
    bad.value_proj.pop_back();
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("batched attention: single query, permutation, spec-scale spot check") {
    std::mt19937_64 rng(23);
    FeatureVolume vol = random_volume(rng, 4, 5, 6, 8);
    const std::size_t q = 37;
    DeformAttnParams p = make_random_attn_params(2, 4, 8, q, 31);
    std::vector<std::vector<double>> queries(q, std::vector<double>(8, 0.0));
    std::vector<VolPos> positions;
    for (std::size_t i = 0; i < q; ++i)
        positions.push_back({unit(rng) * 3.0, unit(rng) * 4.0, unit(rng) * 5.0});
    const auto batch = batched_attention(queries, positions, vol, p);
    REQUIRE(batch.size() == q);
    for (std::size_t i = 0; i < q; ++i) {
        const auto want = oracle::attention(positions[i], vol, p, i);
        for (std::size_t cidx = 0; cidx < want.size(); ++cidx)
            CHECK(std::fabs(batch[i][cidx] - want[cidx]) < 1e-9);
    }

    // Spec-scale volume of queries: completes, and spot checks agree.
    const int gx = 200, gy = 200, gz = 16;
    const std::size_t total = std::size_t(gx) * gy * gz;
    DeformAttnParams big = make_random_attn_params(2, 4, 8, total, 37);
    std::vector<std::vector<double>> big_queries(total);
    std::vector<VolPos> big_positions(total);
    std::size_t idx = 0;
    for (int z = 0; z < gz; ++z)
        for (int y = 0; y < gy; ++y)
            for (int x = 0; x < gx; ++x, ++idx)
                big_positions[idx] = {unit(rng) * 3.0, unit(rng) * 4.0, unit(rng) * 5.0};
    const auto big_out = batched_attention(big_queries, big_positions, vol, big);
    REQUIRE(big_out.size() == total);
    for (int probe = 0; probe < 100; ++probe) {
        const std::size_t i = rng() % total;
        const auto want = oracle::attention(big_positions[i], vol, big, i);
        for (std::size_t cidx = 0; cidx < want.size(); ++cidx)
            CHECK(std::fabs(big_out[i][cidx] - want[cidx]) < 1e-9);
    }
}

TEST_CASE("cascade: identity reshape and shape chain") {
    CascadeSchedule sched;
    sched.steps = 2;
    sched.heights = {2, 4};
    sched.channels = {4, 2};
    const std::size_t n = 8;
    sched.lift_weights = {std::vector<double>(n * n, 0.0)};
    sched.lift_bias = {std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) sched.lift_weights[0][i * n + i] = 1.0;
    sched.validate();
    std::mt19937_64 rng(41);
    FeatureVolume vol = random_volume(rng, 2, 3, 3, 4);
    const FeatureVolume out = cascade_lift(vol, sched, 0);
    CHECK(out.dim_z == 4);
    CHECK(out.channels == 2);
    // Z_i*C_i == Z_{i+1}*C_{i+1} with identity weights: a pure reshape of
    // each column's flattened (z, c) vector.
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(out.cell(int(j / 2), y, x)[int(j % 2)] ==
                      vol.cell(int(j / 4), y, x)[int(j % 4)]);

    const CascadeSchedule def = make_default_schedule(0);
    FeatureVolume start = random_volume(rng, 2, 4, 4, 128);
    FeatureVolume v = start;
    const int want_z[] = {2, 4, 8, 16};
    const int want_c[] = {128, 128, 64, 64};
    CHECK(v.dim_z == want_z[0]);
    CHECK(v.channels == want_c[0]);
    for (int step = 0; step + 1 < def.steps; ++step) {
        v = cascade_lift(v, def, step);
        CHECK(v.dim_z == want_z[step + 1]);
        CHECK(v.channels == want_c[step + 1]);
        CHECK(v.dim_y == 4);
        CHECK(v.dim_x == 4);
    }
    const FeatureVolume full = cascade_run(start, def);
    CHECK(full.dim_z == 16);
    CHECK(full.channels == 64);
}

TEST_CASE("cascade matches the per-column matrix-product oracle") {
    std::mt19937_64 rng(43);
    const CascadeSchedule def = make_default_schedule(7);
    for (int step = 0; step + 1 < def.steps; ++step) {
        FeatureVolume vol = random_volume(rng, def.heights[std::size_t(step)], 3, 2,
                                          def.channels[std::size_t(step)]);
        const FeatureVolume got = cascade_lift(vol, def, step);
        const FeatureVolume want = oracle::cascade(vol, def, step);
        REQUIRE(got.data.size() == want.data.size());
        for (std::size_t i = 0; i < got.data.size(); ++i)
            CHECK(std::fabs(got.data[i] - want.data[i]) < 1e-9);
    }
    FeatureVolume bad = random_volume(rng, 3, 3, 3, 128);
    CHECK_THROWS_AS(cascade_lift(bad, def, 0), Error);
}

TEST_CASE("project_points: optical axis, pinhole arithmetic, depth sign") {
    CameraModel cam;
    cam.fx = 1.0;
    cam.fy = 1.0;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.width = 640;
    cam.height = 480;
    // Extrinsic camera->ego: camera +z (depth) along ego +x.
    cam.extrinsic.rotation = {0.5, -0.5, 0.5, -0.5};
    const auto pr = project_points({{1.0, 0.0, 0.0}}, cam);
    REQUIRE(pr.size() == 1);
    CHECK(pr[0].valid);
    CHECK(pr[0].u == doctest::Approx(320.0));
    CHECK(pr[0].v == doctest::Approx(240.0));

    CameraModel straight;  // identity extrinsic: ego +z is depth
    straight.fx = 100.0;
    straight.fy = 100.0;
    straight.cx = 320.0;
    straight.cy = 240.0;
    straight.width = 640;
    straight.height = 480;
    const auto pin = project_points({{1.0, 0.0, 2.0}, {0.0, 0.0, -1.0}}, straight);
    CHECK(pin[0].valid);
    CHECK(pin[0].u == doctest::Approx(370.0));
    CHECK_FALSE(pin[1].valid);
}

TEST_CASE("reference_points: spacing and containment") {
    GridSpec g;
    const auto one = reference_points(g, 1);
    const Vec3 c = one.point({10, 20, 3}, 0);
    const Vec3 center = voxel_center({10, 20, 3}, g);
    CHECK(c.x == center.x);
    CHECK(c.y == center.y);
    CHECK(c.z == center.z);

    const auto four = reference_points(g, 4);
    const double fracs[] = {0.125, 0.375, 0.625, 0.875};
    for (int j = 0; j < 4; ++j) {
        const Vec3 p = four.point({0, 0, 0}, j);
        CHECK(p.z == doctest::Approx(g.origin.z + fracs[j] * g.resolution));
        // inside the voxel AABB
        CHECK(p.x > g.origin.x);
        CHECK(p.x < g.origin.x + g.resolution);
        CHECK(p.z > g.origin.z);
        CHECK(p.z < g.origin.z + g.resolution);
    }
    CHECK_THROWS_AS(four.point({0, 0, 0}, 4), Error);
}

TEST_CASE("focal loss: exact values") {
    // p_t = 1 -> 0
    std::vector<double> probs = {1.0, 0.0};
    LossResult r = focal_loss(probs, 2, {0}, 0.25, 2.0);
    CHECK(r.value == 0.0);

    // gamma 0, alpha 1: plain cross-entropy
    probs = {0.25, 0.75};
    r = focal_loss(probs, 2, {1}, 1.0, 0.0);
    CHECK(r.value == doctest::Approx(-std::log(0.75)).epsilon(1e-12));

    // p_t = 0.5, gamma 2, alpha 0.25 -> 0.25 * 0.25 * ln 2
    probs = {0.5, 0.5};
    r = focal_loss(probs, 2, {0}, 0.25, 2.0);
    CHECK(r.value == doctest::Approx(0.25 * 0.25 * std::log(2.0)).epsilon(1e-12));

    // rows with target 255 are skipped
    probs = {0.5, 0.5, 1.0, 0.0};
    r = focal_loss(probs, 2, {0, 255}, 0.25, 2.0);
    CHECK(r.value == doctest::Approx(0.25 * 0.25 * std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(focal_loss({0.0, 1.0}, 2, {0}, 0.25, 2.0), Error);
}

TEST_CASE("focal loss: permutation invariance and gamma-zero equivalence") {
    std::mt19937_64 rng(47);
    const std::size_t n = 40, k = 5;
    std::vector<double> probs(n * k);
    std::vector<Label> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            probs[i * k + j] = 0.05 + unit(rng);
            sum += probs[i * k + j];
        }
        for (std::size_t j = 0; j < k; ++j) probs[i * k + j] /= sum;
        targets[i] = Label(rng() % k);
    }
    const double base = focal_loss(probs, k, targets, 1.0, 0.0).value;
    double ce = 0.0;
    for (std::size_t i = 0; i < n; ++i) ce -= std::log(probs[i * k + targets[i]]);
    CHECK(std::fabs(base - ce / double(n)) < 1e-12);

    // permute rows
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> probs2(n * k);
    std::vector<Label> targets2(n);
    for (std::size_t i = 0; i < n; ++i) {
        targets2[i] = targets[perm[i]];
        for (std::size_t j = 0; j < k; ++j) probs2[i * k + j] = probs[perm[i] * k + j];
    }
    const double permuted = focal_loss(probs2, k, targets2, 1.0, 0.0).value;
    CHECK(std::fabs(base - permuted) < 1e-12);
}

TEST_CASE("l1 flow loss: exact values and empty mask") {
    std::vector<double> pred = {1.0, 2.0, 3.0, 4.0};
    LossResult r = l1_flow_loss(pred, pred, {1, 1});
    CHECK(r.value == 0.0);

    std::vector<double> gt = {0.0, 2.0, 2.0, 4.0};
    r = l1_flow_loss(pred, gt, {1, 1});
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));

    r = l1_flow_loss(pred, gt, {0, 0});
    CHECK(r.value == 0.0);
    for (double g : r.grad) CHECK(g == 0.0);
}

TEST_CASE("grad_check: linear functions are exact; losses pass") {
    std::mt19937_64 rng(53);
    std::vector<double> coef(6), x(6), g(6);
    for (int i = 0; i < 6; ++i) {
        coef[std::size_t(i)] = sym(rng, 2.0);
        x[std::size_t(i)] = sym(rng, 2.0);
        g[std::size_t(i)] = coef[std::size_t(i)];
    }
    const auto lin = [&](const std::vector<double>& p) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += coef[i] * p[i];
        return s;
    };
    CHECK(grad_check(lin, x, g, 1e-5).max_rel_err <= 1e-10);

    // focal loss gradient at a random interior point
    const std::size_t n = 8, k = 4;
    std::vector<double> probs(n * k);
    std::vector<Label> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            probs[i * k + j] = 0.1 + unit(rng);
            sum += probs[i * k + j];
        }
        for (std::size_t j = 0; j < k; ++j) probs[i * k + j] /= sum;
        targets[i] = Label(rng() % k);
    }
    const auto f_focal = [&](const std::vector<double>& p) {
        return focal_loss(p, k, targets, 0.25, 2.0).value;
    };
    const auto fr = focal_loss(probs, k, targets, 0.25, 2.0);
    CHECK(grad_check(f_focal, probs, fr.grad, 1e-5).max_rel_err <= 1e-5);

    // l1 flow gradient away from ties
    std::vector<double> pf(12), gf(12);
    for (std::size_t i = 0; i < 12; ++i) {
        pf[i] = sym(rng, 2.0);
        gf[i] = pf[i] + (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + unit(rng));
    }
    std::vector<std::uint8_t> mask = {1, 0, 1, 1, 0, 1};
    const auto f_l1 = [&](const std::vector<double>& p) {
        return l1_flow_loss(p, gf, mask).value;
    };
    const auto lr = l1_flow_loss(pf, gf, mask);
    CHECK(grad_check(f_l1, pf, lr.grad, 1e-5).max_rel_err <= 1e-6);
}

TEST_CASE("selftest suite passes end to end") {
    const SelftestReport rep = run_selftest(2024);
    for (const auto& item : rep.items) {
        CAPTURE(item.name);
        CAPTURE(item.detail);
        CHECK(item.pass);
    }
    CHECK(rep.all_pass());
}
