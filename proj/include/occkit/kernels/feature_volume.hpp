#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "occkit/types.hpp"

namespace occkit::kernels {

// Continuous position in volume coordinate order (z, y, x), cell units.
// Integer positions sit at cell centers.
struct VolPos {
    double z = 0.0, y = 0.0, x = 0.0;

    VolPos operator+(const VolPos& o) const { return {z + o.z, y + o.y, x + o.x}; }
    bool finite() const {
        return std::isfinite(z) && std::isfinite(y) && std::isfinite(x);
    }
};

// Dense feature tensor indexed (z, y, x, c), c fastest. Continuous spatial
// coordinates put integer positions at cell centers, so the sampled range is
// [0, dim-1] per axis after border clamping. Z = 1 degenerates to a 2D map.
struct FeatureVolume {
    int dim_z = 0, dim_y = 0, dim_x = 0, channels = 0;
    std::vector<double> data;

    FeatureVolume() = default;
    FeatureVolume(int z, int y, int x, int c)
        : dim_z(z), dim_y(y), dim_x(x), channels(c) {
        if (z < 1 || y < 1 || x < 1 || c < 1)
            throw Error("FeatureVolume: dims and channels must be >= 1");
        data.assign(std::size_t(z) * y * x * c, 0.0);
    }

    std::size_t cell_count() const { return std::size_t(dim_z) * dim_y * dim_x; }

    std::size_t offset(int z, int y, int x) const {
        return ((std::size_t(z) * dim_y + y) * dim_x + x) * channels;
    }
    double* cell(int z, int y, int x) { return data.data() + offset(z, y, x); }
    const double* cell(int z, int y, int x) const { return data.data() + offset(z, y, x); }

    std::string shape_str() const {
        return "(" + std::to_string(dim_z) + "," + std::to_string(dim_y) + "," +
               std::to_string(dim_x) + "," + std::to_string(channels) + ")";
    }
};

}  // namespace occkit::kernels
