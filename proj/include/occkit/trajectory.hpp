#pragma once

#include <vector>

#include "occkit/grid.hpp"
#include "occkit/types.hpp"

namespace occkit {

struct TrajectorySample {
    double t = 0.0;        // seconds from plan start
    double x = 0.0, y = 0.0;  // BEV meters, ego frame at t=0
    double heading = 0.0;  // radians, 0 = +x
    double speed = 0.0;    // m/s
};

struct Trajectory {
    std::vector<TrajectorySample> samples;

    // Samples start at t = 0 and increase strictly; all values finite.
    void validate() const;
    double end_time() const;
    const TrajectorySample& endpoint() const;
    // Linear interpolation at time t in [0, end_time()]; heading blends along
    // the shortest arc.
    TrajectorySample interpolate(double t) const;
};

// Ego vehicle rectangle, centered on the sample position, length along the
// heading.
struct Footprint {
    double length = 4.1;
    double width = 1.8;

    void validate() const;
};

// Number of occupied BEV cells whose centers fall inside the footprint
// rectangle placed at (x, y) with the given heading. Boundary centers count
// as inside.
int footprint_overlap(const BevGrid& bev, double x, double y, double heading,
                      const Footprint& fp);

}  // namespace occkit
