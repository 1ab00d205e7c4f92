#include "occkit/kernels/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "occkit/kernels/losses.hpp"
#include "occkit/kernels/trilinear.hpp"

namespace occkit::kernels {

namespace {

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
double sym(std::mt19937_64& rng, double s) { return (2.0 * unit(rng) - 1.0) * s; }

}  // namespace

namespace oracle {

std::vector<double> trilinear(const FeatureVolume& vol, const VolPos& p) {
    const auto cl = [](double v, int d) { return std::clamp(v, 0.0, double(d - 1)); };
    const double pz = cl(p.z, vol.dim_z), py = cl(p.y, vol.dim_y), px = cl(p.x, vol.dim_x);
    const int z0 = int(std::floor(pz)), y0 = int(std::floor(py)), x0 = int(std::floor(px));
    const int z1 = std::min(z0 + 1, vol.dim_z - 1);
    const int y1 = std::min(y0 + 1, vol.dim_y - 1);
    const int x1 = std::min(x0 + 1, vol.dim_x - 1);
    const double fz = pz - z0, fy = py - y0, fx = px - x0;
    std::vector<double> out(std::size_t(vol.channels));
    for (int c = 0; c < vol.channels; ++c) {
        const auto at = [&](int z, int y, int x) { return vol.cell(z, y, x)[c]; };
        // Successive lerps: x, then y, then z.
        const double e00 = at(z0, y0, x0) + fx * (at(z0, y0, x1) - at(z0, y0, x0));
        const double e01 = at(z0, y1, x0) + fx * (at(z0, y1, x1) - at(z0, y1, x0));
        const double e10 = at(z1, y0, x0) + fx * (at(z1, y0, x1) - at(z1, y0, x0));
        const double e11 = at(z1, y1, x0) + fx * (at(z1, y1, x1) - at(z1, y1, x0));
        const double f0 = e00 + fy * (e01 - e00);
        const double f1 = e10 + fy * (e11 - e10);
        out[std::size_t(c)] = f0 + fz * (f1 - f0);
    }
    return out;
}

std::vector<double> attention(const VolPos& p, const FeatureVolume& vol,
                              const DeformAttnParams& params, std::size_t query_index) {
    const std::size_t c = std::size_t(params.channels);
    const std::size_t cm = c / std::size_t(params.heads);
    const std::size_t base =
        query_index * std::size_t(params.heads) * std::size_t(params.points);
    std::vector<double> out(c, 0.0);
    for (int m = 0; m < params.heads; ++m) {
        std::vector<double> acc(cm, 0.0);
        for (int k = 0; k < params.points; ++k) {
            const std::size_t idx = base + std::size_t(m) * params.points + k;
            const auto s = trilinear(vol, p + params.offsets[idx]);
            const auto& vp = params.value_proj[std::size_t(k)];
            for (std::size_t r = 0; r < cm; ++r) {
                double dot = 0.0;
                for (std::size_t cc = 0; cc < c; ++cc) dot += vp[cc * cm + r] * s[cc];
                acc[r] += params.attention_weights[idx] * dot;
            }
        }
        const auto& op = params.output_proj[std::size_t(m)];
        for (std::size_t r = 0; r < c; ++r) {
            double dot = 0.0;
            for (std::size_t cc = 0; cc < cm; ++cc) dot += op[cc * c + r] * acc[cc];
            out[r] += dot;
        }
    }
    return out;
}

FeatureVolume cascade(const FeatureVolume& vol, const CascadeSchedule& sched, int step) {
    const int zo = sched.heights[std::size_t(step) + 1];
    const int co = sched.channels[std::size_t(step) + 1];
    const std::size_t n_in = sched.in_size(step);
    const std::size_t n_out = sched.out_size(step);
    const auto& w = sched.lift_weights[std::size_t(step)];
    const auto& b = sched.lift_bias[std::size_t(step)];
    FeatureVolume out(zo, vol.dim_y, vol.dim_x, co);
    std::vector<double> in(n_in);
    for (int y = 0; y < vol.dim_y; ++y)
        for (int x = 0; x < vol.dim_x; ++x) {
            std::size_t i = 0;
            for (int z = 0; z < vol.dim_z; ++z)
                for (int cc = 0; cc < vol.channels; ++cc)
                    in[i++] = vol.cell(z, y, x)[cc];
            for (std::size_t r = 0; r < n_out; ++r) {
                double dot = b[r];
                for (std::size_t cc = 0; cc < n_in; ++cc) dot += w[cc * n_out + r] * in[cc];
                out.cell(int(r / std::size_t(co)), y, x)[r % std::size_t(co)] = dot;
            }
        }
    return out;
}

}  // namespace oracle

namespace {

FeatureVolume random_volume(std::mt19937_64& rng, int z, int y, int x, int c) {
    FeatureVolume v(z, y, x, c);
    for (auto& d : v.data) d = sym(rng, 1.0);
    return v;
}

CheckResult fail(std::string name, std::string detail) {
    return {std::move(name), false, std::move(detail)};
}

CheckResult pass(std::string name, std::string detail) {
    return {std::move(name), true, std::move(detail)};
}

}  // namespace

CheckResult check_trilinear_affine(std::uint64_t seed, int fields, int points_per_field,
                                   double tol) {
    const std::string name = "trilinear affine reproduction";
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int f = 0; f < fields; ++f) {
        const int dz = 2 + int(rng() % 6), dy = 2 + int(rng() % 6), dx = 2 + int(rng() % 6);
        const int ch = 1 + int(rng() % 4);
        // f(z,y,x) = az*z + ay*y + ax*x + a0 per channel; trilinear blending
        // reproduces it exactly in the interior.
        std::vector<double> az(ch), ay(ch), ax(ch), a0(ch);
        for (int c = 0; c < ch; ++c) {
            az[c] = sym(rng, 3.0);
            ay[c] = sym(rng, 3.0);
            ax[c] = sym(rng, 3.0);
            a0[c] = sym(rng, 3.0);
        }
        FeatureVolume vol(dz, dy, dx, ch);
        for (int z = 0; z < dz; ++z)
            for (int y = 0; y < dy; ++y)
                for (int x = 0; x < dx; ++x)
                    for (int c = 0; c < ch; ++c)
                        vol.cell(z, y, x)[c] = az[c] * z + ay[c] * y + ax[c] * x + a0[c];
        std::vector<double> got(static_cast<std::size_t>(ch));
        for (int i = 0; i < points_per_field; ++i) {
            const VolPos p{unit(rng) * (dz - 1), unit(rng) * (dy - 1), unit(rng) * (dx - 1)};
            trilinear_sample(vol, p, got.data());
            for (int c = 0; c < ch; ++c) {
                const double want = az[c] * p.z + ay[c] * p.y + ax[c] * p.x + a0[c];
                worst = std::max(worst, std::fabs(got[std::size_t(c)] - want));
            }
        }
    }
    std::ostringstream d;
    d << "max error " << worst << " over " << fields << " fields (tol " << tol << ")";
    return worst <= tol ? pass(name, d.str()) : fail(name, d.str());
}

CheckResult check_attention_oracle(std::uint64_t seed, int instances, double rel_tol) {
    const std::string name = "attention vs naive oracle";
    std::mt19937_64 rng(seed);
    const int m_choices[] = {1, 2, 4};
    const int k_choices[] = {1, 4, 8};
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int m = m_choices[rng() % 3];
        const int k = k_choices[rng() % 3];
        const int cm = 1 + int(rng() % std::uint64_t(16 / m));
        const int c = m * cm;
        const int dz = 2 + int(rng() % 7), dy = 2 + int(rng() % 7), dx = 2 + int(rng() % 7);
        const auto vol = random_volume(rng, dz, dy, dx, c);
        auto params = make_random_attn_params(m, k, c, 1, rng());
        const VolPos p{unit(rng) * (dz - 1), unit(rng) * (dy - 1), unit(rng) * (dx - 1)};
        const auto got = deformable_attention_3d({}, p, vol, params);
        const auto want = oracle::attention(p, vol, params, 0);
        for (int cc = 0; cc < c; ++cc) {
            const double denom = std::max(
                {std::fabs(got[std::size_t(cc)]), std::fabs(want[std::size_t(cc)]), 1e-12});
            worst = std::max(
                worst, std::fabs(got[std::size_t(cc)] - want[std::size_t(cc)]) / denom);
        }
    }
    std::ostringstream d;
    d << "max relative diff " << worst << " over " << instances << " instances (tol "
      << rel_tol << ")";
    return worst <= rel_tol ? pass(name, d.str()) : fail(name, d.str());
}

CheckResult check_cascade_shapes(const std::vector<int>& hw_sizes) {
    const std::string name = "cascade default shape chain";
    const auto sched = make_default_schedule(7);
    for (int hw : hw_sizes) {
        FeatureVolume vol(2, hw, hw, 128);
        FeatureVolume cur = vol;
        const int want_z[] = {2, 4, 8, 16};
        const int want_c[] = {128, 128, 64, 64};
        for (int step = 0; step + 1 < sched.steps; ++step) {
            cur = cascade_lift(cur, sched, step);
            const int wz = want_z[step + 1], wc = want_c[step + 1];
            if (cur.dim_z != wz || cur.dim_y != hw || cur.dim_x != hw || cur.channels != wc)
                return fail(name, "H=W=" + std::to_string(hw) + " step " +
                                      std::to_string(step) + " gave " + cur.shape_str());
        }
        if (cur.dim_z != 16 || cur.channels != 64)
            return fail(name, "final shape " + cur.shape_str());
    }
    std::string sizes;
    for (int hw : hw_sizes) sizes += (sizes.empty() ? "" : ", ") + std::to_string(hw);
    return pass(name, "(2,H,W,128)->(4,H,W,128)->(8,H,W,64)->(16,H,W,64) for H=W in {" +
                          sizes + "}");
}

CheckResult check_cascade_oracle(std::uint64_t seed, int instances, double tol) {
    const std::string name = "cascade vs matrix-product oracle";
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        CascadeSchedule s;
        s.steps = 2;
        s.heights = {1 + int(rng() % 4), 0};
        s.heights[1] = s.heights[0] + 1 + int(rng() % 4);
        s.channels = {1 + int(rng() % 8), 1 + int(rng() % 8)};
        s.lift_weights.resize(1);
        s.lift_bias.resize(1);
        s.lift_weights[0].resize(s.in_size(0) * s.out_size(0));
        for (auto& v : s.lift_weights[0]) v = sym(rng, 1.0);
        s.lift_bias[0].resize(s.out_size(0));
        for (auto& v : s.lift_bias[0]) v = sym(rng, 1.0);
        const int hw = 2 + int(rng() % 5);
        std::mt19937_64 vrng(rng());
        const auto vol = random_volume(vrng, s.heights[0], hw, hw, s.channels[0]);
        const auto got = cascade_lift(vol, s, 0);
        const auto want = oracle::cascade(vol, s, 0);
        for (std::size_t j = 0; j < got.data.size(); ++j)
            worst = std::max(worst, std::fabs(got.data[j] - want.data[j]));
    }
    std::ostringstream d;
    d << "max abs diff " << worst << " over " << instances << " random steps (tol " << tol
      << ")";
    return worst <= tol ? pass(name, d.str()) : fail(name, d.str());
}

CheckResult check_grad_focal(std::uint64_t seed, int points, double step, double tol) {
    const std::string name = "focal loss gradient";
    std::mt19937_64 rng(seed);
    const std::size_t rows = 8, classes = 5;
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        std::vector<double> probs(rows * classes);
        std::vector<Label> targets(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < classes; ++c) {
                probs[r * classes + c] = 0.05 + unit(rng);
                sum += probs[r * classes + c];
            }
            for (std::size_t c = 0; c < classes; ++c) probs[r * classes + c] /= sum;
            targets[r] = Label(rng() % classes);
        }
        targets[rows - 1] = kUnknown;  // exercise the ignore path
        const double alpha = 0.25, gamma = 2.0;
        const auto res = focal_loss(probs, classes, targets, alpha, gamma);
        const auto f = [&](const std::vector<double>& x) {
            return focal_loss(x, classes, targets, alpha, gamma).value;
        };
        worst = std::max(worst, grad_check(f, probs, res.grad, step).max_rel_err);
    }
    std::ostringstream d;
    d << "max relative error " << worst << " over " << points << " points (tol " << tol
      << ")";
    return worst <= tol ? pass(name, d.str()) : fail(name, d.str());
}

CheckResult check_grad_l1(std::uint64_t seed, int points, double step, double tol) {
    const std::string name = "flow loss gradient";
    std::mt19937_64 rng(seed);
    const std::size_t n = 12;
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        std::vector<double> pred(n * 2), gt(n * 2);
        std::vector<std::uint8_t> mask(n);
        for (std::size_t j = 0; j < n; ++j) mask[j] = (rng() % 4) != 0;
        for (std::size_t j = 0; j < n * 2; ++j) {
            gt[j] = sym(rng, 2.0);
            // Keep the residual away from 0 so +-step probes stay on one side
            // of the kink.
            const double off = 0.01 + unit(rng);
            pred[j] = gt[j] + ((rng() & 1) ? off : -off);
        }
        const auto res = l1_flow_loss(pred, gt, mask);
        const auto f = [&](const std::vector<double>& x) {
            return l1_flow_loss(x, gt, mask).value;
        };
        worst = std::max(worst, grad_check(f, pred, res.grad, step).max_rel_err);
    }
    std::ostringstream d;
    d << "max relative error " << worst << " over " << points << " points (tol " << tol
      << ")";
    return worst <= tol ? pass(name, d.str()) : fail(name, d.str());
}

CheckResult check_attention_linearity(std::uint64_t seed) {
    const std::string name = "attention linear in features";
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20; ++i) {
        const auto vol = random_volume(rng, 3, 4, 4, 8);
        auto params = make_random_attn_params(2, 4, 8, 1, rng());
        const VolPos p{unit(rng) * 2, unit(rng) * 3, unit(rng) * 3};
        const auto once = deformable_attention_3d({}, p, vol, params);
        FeatureVolume doubled = vol;
        for (auto& v : doubled.data) v *= 2.0;
        const auto twice = deformable_attention_3d({}, p, doubled, params);
        for (std::size_t c = 0; c < once.size(); ++c) {
            const double diff = std::fabs(twice[c] - 2.0 * once[c]);
            if (diff > 1e-12 * std::max(1.0, std::fabs(once[c])))
                return fail(name, "doubling features missed 2x by " + std::to_string(diff));
        }
    }
    return pass(name, "doubling all features doubles the output");
}

CheckResult check_offset_collapse(std::uint64_t seed) {
    const std::string name = "equal offsets ignore attention weights";
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20; ++i) {
        const auto vol = random_volume(rng, 3, 4, 4, 8);
        auto a = make_random_attn_params(2, 4, 8, 1, rng());
        // Same sampling point and same value projection for every k: the
        // convex combination collapses and the weights cannot matter.
        for (auto& w : a.value_proj) w = a.value_proj[0];
        const VolPos shared{sym(rng, 2.0), sym(rng, 2.0), sym(rng, 2.0)};
        for (auto& o : a.offsets) o = shared;
        auto b = a;
        std::mt19937_64 wrng(rng());
        for (int m = 0; m < b.heads; ++m) {
            double sum = 0.0;
            const std::size_t base = std::size_t(m) * b.points;
            for (int k = 0; k < b.points; ++k) {
                b.attention_weights[base + k] = 0.05 + unit(wrng);
                sum += b.attention_weights[base + k];
            }
            for (int k = 0; k < b.points; ++k) b.attention_weights[base + k] /= sum;
        }
        const VolPos p{unit(rng) * 2, unit(rng) * 3, unit(rng) * 3};
        const auto ra = deformable_attention_3d({}, p, vol, a);
        const auto rb = deformable_attention_3d({}, p, vol, b);
        for (std::size_t c = 0; c < ra.size(); ++c)
            if (std::fabs(ra[c] - rb[c]) > 1e-12 * std::max(1.0, std::fabs(ra[c])))
                return fail(name, "weight change leaked into output");
    }
    return pass(name, "output invariant to weights when sampling points coincide");
}

bool SelftestReport::all_pass() const {
    for (const auto& it : items)
        if (!it.pass) return false;
    return true;
}

SelftestReport run_selftest(std::uint64_t seed) {
    SelftestReport r;
    r.items.push_back(check_trilinear_affine(seed + 1, 50, 1000, 1e-9));
    r.items.push_back(check_attention_oracle(seed + 2, 200, 1e-6));
    r.items.push_back(check_cascade_shapes({4, 8}));
    r.items.push_back(check_cascade_oracle(seed + 3, 50, 1e-9));
    r.items.push_back(check_grad_focal(seed + 4, 100, 1e-5, 1e-5));
    r.items.push_back(check_grad_l1(seed + 5, 100, 1e-5, 1e-5));
    r.items.push_back(check_attention_linearity(seed + 6));
    r.items.push_back(check_offset_collapse(seed + 7));
    return r;
}

}  // namespace occkit::kernels
