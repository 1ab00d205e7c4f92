#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "occkit/occgen.hpp"

namespace occkit::occgen {

VoxelGrid voxelize_majority(const PointCloud& points, const GridSpec& spec,
                            int min_points) {
    spec.validate();
    points.validate();
    if (min_points < 1) throw Error("voxelize: min_points must be >= 1");
    if (points.labels.empty() && !points.points.empty())
        throw Error("voxelize: points carry no labels");

    // (voxel, label) pairs sorted so votes group deterministically no matter
    // the input order.
    std::vector<std::pair<std::size_t, Label>> votes;
    votes.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points.labels[i] == kUnknown) continue;
        const auto idx = world_to_voxel(points.points[i], spec);
        if (!idx) continue;
        votes.emplace_back(spec.flat(idx->x, idx->y, idx->z), points.labels[i]);
    }
    std::sort(votes.begin(), votes.end());

    VoxelGrid grid(spec);
    std::size_t i = 0;
    while (i < votes.size()) {
        std::size_t j = i;
        while (j < votes.size() && votes[j].first == votes[i].first) ++j;
        if (j - i >= std::size_t(min_points)) {
            // Runs of equal labels inside the group; first max run wins, and
            // sorting already put smaller codes first.
            Label best = votes[i].second;
            std::size_t best_n = 0, k = i;
            while (k < j) {
                std::size_t r = k;
                while (r < j && votes[r].second == votes[k].second) ++r;
                if (r - k > best_n) {
                    best_n = r - k;
                    best = votes[k].second;
                }
                k = r;
            }
            grid.labels[votes[i].first] = best;
        }
        i = j;
    }
    return grid;
}

PlacedGrid place_objects(const VoxelGrid& background,
                         const std::map<std::uint64_t, PointCloud>& per_track,
                         const std::vector<Box3D>& boxes_at_t, int min_points) {
    const GridSpec& spec = background.spec;
    PlacedGrid placed(spec);
    placed.grid = background;

    // Claims resolve like split_points: nearest box center to the voxel
    // center, then smaller track id.
    std::vector<double> claim_d2(spec.voxel_count(), 0.0);
    for (const auto& box : boxes_at_t) {
        const auto it = per_track.find(box.track_id);
        if (it == per_track.end() || it->second.points.empty()) continue;
        PointCloud world;
        world.points.reserve(it->second.size());
        world.labels = it->second.labels;
        for (const auto& p : it->second.points) world.points.push_back(box.to_world(p));
        const VoxelGrid obj = voxelize_majority(world, spec, min_points);
        for (int z = 0; z < spec.dims.z; ++z)
            for (int y = 0; y < spec.dims.y; ++y)
                for (int x = 0; x < spec.dims.x; ++x) {
                    const std::size_t fi = spec.flat(x, y, z);
                    if (obj.labels[fi] == kFree) continue;
                    const Vec3 d = voxel_center({x, y, z}, spec) - box.center;
                    const double d2 = d.dot(d);
                    auto& owner = placed.track[fi];
                    if (owner != PlacedGrid::kNoTrack &&
                        (claim_d2[fi] < d2 ||
                         (claim_d2[fi] == d2 && owner < box.track_id)))
                        continue;
                    owner = box.track_id;
                    claim_d2[fi] = d2;
                    placed.grid.labels[fi] = obj.labels[fi];
                }
    }
    return placed;
}

void annotate_flow(PlacedGrid& placed, const std::vector<Box3D>& boxes_at_t,
                   const FlowConfig& cfg) {
    cfg.validate();
    std::map<std::uint64_t, Vec2> velocity;
    for (const auto& b : boxes_at_t) {
        if (!std::isfinite(b.velocity.x) || !std::isfinite(b.velocity.y))
            throw Error("annotate_flow: track " + std::to_string(b.track_id) +
                        " has non-finite velocity");
        velocity[b.track_id] = b.velocity;
    }
    placed.grid.enable_flow();
    for (std::size_t i = 0; i < placed.track.size(); ++i) {
        if (placed.track[i] == PlacedGrid::kNoTrack) continue;
        const auto it = velocity.find(placed.track[i]);
        if (it == velocity.end())
            throw Error("annotate_flow: voxel owned by track " +
                        std::to_string(placed.track[i]) + " but no box given");
        placed.grid.flow[i * 2] = float(it->second.x);
        placed.grid.flow[i * 2 + 1] = float(it->second.y);
    }
}

}  // namespace occkit::occgen
