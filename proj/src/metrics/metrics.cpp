#include "occkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "occkit/simd/kernels.hpp"

namespace occkit::metrics {

void ConfusionMatrix::merge(const ConfusionMatrix& o) {
    for (std::size_t c = 0; c <= kNumClasses; ++c) {
        tp[c] += o.tp[c];
        fp[c] += o.fp[c];
        fn[c] += o.fn[c];
    }
    geo_tp += o.geo_tp;
    geo_fp += o.geo_fp;
    geo_fn += o.geo_fn;
    geo_tn += o.geo_tn;
    evaluated += o.evaluated;
}

namespace {

// Returns nullptr when every voxel is evaluated; otherwise the 0/1 grid of
// voxels to keep.
const std::vector<std::uint8_t>* resolve_mask(const VoxelGrid& gt, const EvalMask& mask) {
    if (mask.policy == MaskPolicy::all) return nullptr;
    if (!mask.external.empty()) {
        if (mask.external.size() != gt.spec.voxel_count())
            throw Error("eval mask: external grid size does not match the volume");
        return &mask.external;
    }
    if (!gt.has_visibility())
        throw Error("eval mask: visible_only needs a visibility grid");
    return &gt.visibility;
}

void check_specs(const VoxelGrid& pred, const VoxelGrid& gt) {
    if (!(pred.spec == gt.spec))
        throw Error("confusion: prediction and ground-truth grids differ in spec");
}

void tally(ConfusionMatrix& cm, Label p, Label g) {
    if (p == kUnknown) throw Error("confusion: prediction contains unknown label");
    ++cm.evaluated;
    const bool po = p != kFree, go = g != kFree;
    if (po && go)
        ++cm.geo_tp;
    else if (po)
        ++cm.geo_fp;
    else if (go)
        ++cm.geo_fn;
    else
        ++cm.geo_tn;
    if (p == g) {
        if (is_semantic(p)) ++cm.tp[p];
    } else {
        if (is_semantic(p)) ++cm.fp[p];
        if (is_semantic(g)) ++cm.fn[g];
    }
}

}  // namespace

ConfusionMatrix confusion_accumulate(const VoxelGrid& pred, const VoxelGrid& gt,
                                     const EvalMask& mask) {
    check_specs(pred, gt);
    const auto* keep = resolve_mask(gt, mask);
    ConfusionMatrix cm;
    const std::size_t n = gt.spec.voxel_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (gt.labels[i] == kUnknown) continue;
        if (keep && !(*keep)[i]) continue;
        tally(cm, pred.labels[i], gt.labels[i]);
    }
    return cm;
}

MiouResult miou(const ConfusionMatrix& cm) {
    MiouResult r;
    double sum = 0.0;
    for (Label c = 1; c <= kNumClasses; ++c) {
        const std::uint64_t denom = cm.tp[c] + cm.fp[c] + cm.fn[c];
        if (denom == 0) continue;
        r.present[c] = true;
        ++r.present_count;
        r.per_class[c] = double(cm.tp[c]) / double(denom);
        sum += r.per_class[c];
    }
    r.value = r.present_count == 0 ? 1.0 : sum / double(r.present_count);
    return r;
}

double miou_subset(const ConfusionMatrix& cm, const std::vector<Label>& classes) {
    if (classes.empty()) throw Error("miou_subset: class list is empty");
    double sum = 0.0;
    int counted = 0;
    for (Label c : classes) {
        if (!is_semantic(c))
            throw Error("miou_subset: label " + std::to_string(int(c)) +
                        " is not a semantic class");
        const std::uint64_t denom = cm.tp[c] + cm.fp[c] + cm.fn[c];
        if (denom == 0) continue;
        sum += double(cm.tp[c]) / double(denom);
        ++counted;
    }
    return counted == 0 ? 1.0 : sum / double(counted);
}

double iou_geo(const ConfusionMatrix& cm) {
    const std::uint64_t uni = cm.geo_tp + cm.geo_fp + cm.geo_fn;
    return uni == 0 ? 1.0 : double(cm.geo_tp) / double(uni);
}

double iou_geo(const VoxelGrid& pred, const VoxelGrid& gt, const EvalMask& mask) {
    check_specs(pred, gt);
    const std::size_t n = gt.spec.voxel_count();
    if (mask.policy == MaskPolicy::all) {
        const bool clean =
            std::memchr(gt.labels.data(), kUnknown, n) == nullptr &&
            std::memchr(pred.labels.data(), kUnknown, n) == nullptr;
        if (clean) {
            const auto pc = simd::active().count_pairs(pred.labels.data(),
                                                       gt.labels.data(), n);
            const std::uint64_t uni = pc.a + pc.b - pc.both;
            return uni == 0 ? 1.0 : double(pc.both) / double(uni);
        }
    }
    return iou_geo(confusion_accumulate(pred, gt, mask));
}

std::vector<Label> lidar_seg_transfer(const PointCloud& points, const VoxelGrid& grid) {
    std::vector<Label> out(points.size(), kUnknown);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto idx = world_to_voxel(points.points[i], grid.spec);
        if (idx) out[i] = grid.labels[grid.spec.flat(idx->x, idx->y, idx->z)];
    }
    return out;
}

ConfusionMatrix point_confusion(const std::vector<Label>& pred,
                                const std::vector<Label>& gt) {
    if (pred.size() != gt.size())
        throw Error("point confusion: label sequences differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (gt[i] == kUnknown || pred[i] == kUnknown) continue;
        tally(cm, pred[i], gt[i]);
    }
    return cm;
}

VoxelGrid boxes_to_voxels(const std::vector<Box3D>& boxes, const GridSpec& spec) {
    spec.validate();
    VoxelGrid grid(spec);
    std::vector<double> claim_d2(spec.voxel_count(), 0.0);
    std::vector<std::uint64_t> owner(spec.voxel_count(), ~std::uint64_t(0));
    for (const auto& box : boxes) {
        box.validate();
        // Scan only the AABB of the rotated box.
        const double c = std::fabs(std::cos(box.yaw)), s = std::fabs(std::sin(box.yaw));
        const double rx = c * box.size.x * 0.5 + s * box.size.y * 0.5;
        const double ry = s * box.size.x * 0.5 + c * box.size.y * 0.5;
        const double rz = box.size.z * 0.5;
        const auto lo_x = int(std::floor((box.center.x - rx - spec.origin.x) / spec.resolution));
        const auto hi_x = int(std::floor((box.center.x + rx - spec.origin.x) / spec.resolution));
        const auto lo_y = int(std::floor((box.center.y - ry - spec.origin.y) / spec.resolution));
        const auto hi_y = int(std::floor((box.center.y + ry - spec.origin.y) / spec.resolution));
        const auto lo_z = int(std::floor((box.center.z - rz - spec.origin.z) / spec.resolution));
        const auto hi_z = int(std::floor((box.center.z + rz - spec.origin.z) / spec.resolution));
        for (int z = std::max(0, lo_z); z <= std::min(spec.dims.z - 1, hi_z); ++z)
            for (int y = std::max(0, lo_y); y <= std::min(spec.dims.y - 1, hi_y); ++y)
                for (int x = std::max(0, lo_x); x <= std::min(spec.dims.x - 1, hi_x); ++x) {
                    const Vec3 center = voxel_center({x, y, z}, spec);
                    if (!point_in_box(center, box)) continue;
                    const Vec3 d = center - box.center;
                    const double d2 = d.dot(d);
                    const std::size_t fi = spec.flat(x, y, z);
                    if (owner[fi] != ~std::uint64_t(0) &&
                        (claim_d2[fi] < d2 ||
                         (claim_d2[fi] == d2 && owner[fi] < box.track_id)))
                        continue;
                    owner[fi] = box.track_id;
                    claim_d2[fi] = d2;
                    grid.labels[fi] = box.label;
                }
    }
    return grid;
}

std::vector<double> planning_l2(const Trajectory& pred, const Trajectory& gt,
                                const std::vector<double>& horizons) {
    pred.validate();
    gt.validate();
    std::vector<double> out;
    for (double h : horizons) {
        if (h > pred.end_time() || h > gt.end_time())
            throw Error("planning_l2: horizon " + std::to_string(h) +
                        " s beyond a trajectory");
        const auto a = pred.interpolate(h);
        const auto b = gt.interpolate(h);
        out.push_back(std::hypot(a.x - b.x, a.y - b.y));
    }
    return out;
}

CollisionReport collision_rate(const std::vector<Trajectory>& trajectories,
                               const BevGrid& occupied, const Footprint& footprint,
                               const std::vector<double>& horizons) {
    footprint.validate();
    CollisionReport rep;
    rep.horizons = horizons;
    rep.rate.assign(horizons.size(), 0.0);
    for (const auto& traj : trajectories) {
        traj.validate();
        // First sample time with footprint overlap, if any.
        double first_hit = -1.0;
        for (const auto& s : traj.samples) {
            if (footprint_overlap(occupied, s.x, s.y, s.heading, footprint) > 0) {
                first_hit = s.t;
                break;
            }
        }
        std::vector<std::uint8_t> row(horizons.size(), 0);
        for (std::size_t h = 0; h < horizons.size(); ++h)
            row[h] = first_hit >= 0.0 && first_hit <= horizons[h];
        rep.collided.push_back(std::move(row));
    }
    if (!trajectories.empty())
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            std::size_t n = 0;
            for (const auto& row : rep.collided) n += row[h];
            rep.rate[h] = double(n) / double(trajectories.size());
        }
    return rep;
}

}  // namespace occkit::metrics
