#include "occkit/kernels/trilinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "occkit/simd/kernels.hpp"

namespace occkit::kernels {

void trilinear_sample(const FeatureVolume& vol, const VolPos& p, double* out) {
    if (!p.finite())
        throw Error("trilinear_sample: non-finite sample position");
    const auto clamped = [](double v, int dim) {
        return std::clamp(v, 0.0, double(dim - 1));
    };
    const double pz = clamped(p.z, vol.dim_z);
    const double py = clamped(p.y, vol.dim_y);
    const double px = clamped(p.x, vol.dim_x);

    const int z0 = int(std::floor(pz)), y0 = int(std::floor(py)), x0 = int(std::floor(px));
    const int z1 = std::min(z0 + 1, vol.dim_z - 1);
    const int y1 = std::min(y0 + 1, vol.dim_y - 1);
    const int x1 = std::min(x0 + 1, vol.dim_x - 1);
    const double fz = pz - z0, fy = py - y0, fx = px - x0;

    const double wz[2] = {1.0 - fz, fz};
    const double wy[2] = {1.0 - fy, fy};
    const double wx[2] = {1.0 - fx, fx};
    const int zi[2] = {z0, z1}, yi[2] = {y0, y1}, xi[2] = {x0, x1};

    std::memset(out, 0, std::size_t(vol.channels) * sizeof(double));
    const auto& k = simd::active();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double w = wz[a] * wy[b] * wx[c];
                k.axpy(w, vol.cell(zi[a], yi[b], xi[c]), out, std::size_t(vol.channels));
            }
}

std::vector<double> trilinear_sample(const FeatureVolume& vol, const VolPos& p) {
    std::vector<double> out(vol.channels);
    trilinear_sample(vol, p, out.data());
    return out;
}

}  // namespace occkit::kernels
