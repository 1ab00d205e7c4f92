#include "occkit/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

namespace occkit::planner {

const char* command_name(CommandKind k) {
    switch (k) {
        case CommandKind::forward: return "forward";
        case CommandKind::turn_left: return "turn_left";
        case CommandKind::turn_right: return "turn_right";
    }
    return "?";
}

void Command::validate() const {
    if (!(lateral_threshold > 0.0) || !std::isfinite(lateral_threshold))
        throw Error("command: lateral threshold must be positive");
}

int SamplerConfig::steps() const { return int(std::llround(horizon / dt)); }

void SamplerConfig::validate() const {
    if (count < 1) throw Error("sampler: count must be >= 1");
    if (!(horizon > 0.0) || !(dt > 0.0) || !std::isfinite(horizon) || !std::isfinite(dt))
        throw Error("sampler: horizon and dt must be positive");
    const int n = steps();
    if (n < 2 || std::fabs(n * dt - horizon) > 1e-9)
        throw Error("sampler: dt must divide horizon into at least 2 steps");
    const double vals[] = {v0_min, v0_max, accel_min, accel_max, kappa_min, kappa_max};
    for (double v : vals)
        if (!std::isfinite(v)) throw Error("sampler: ranges must be finite");
    if (v0_min > v0_max || accel_min > accel_max || kappa_min > kappa_max)
        throw Error("sampler: range min exceeds max");
    if (v0_min < 0.0) throw Error("sampler: initial speed cannot be negative");
}

void CostWeights::validate() const {
    const double vals[] = {safety, comfort, progress, norm_occupancy, norm_boxes};
    for (double v : vals)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error("cost weights: values must be finite and >= 0");
}

namespace {

double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Arc length with the speed clamped at zero once v0 + a t crosses it.
double arc_length(double v0, double a, double t) {
    if (a < 0.0) {
        const double t_stop = -v0 / a;
        if (t >= t_stop) return v0 * t_stop + 0.5 * a * t_stop * t_stop;
    }
    return v0 * t + 0.5 * a * t * t;
}

Trajectory integrate_arc(double v0, double a, double kappa, int steps, double dt) {
    Trajectory traj;
    traj.samples.reserve(std::size_t(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const double t = j * dt;
        const double s = arc_length(v0, a, t);
        TrajectorySample smp;
        smp.t = t;
        smp.speed = std::max(0.0, v0 + a * t);
        smp.heading = kappa * s;
        if (std::fabs(kappa) < 1e-12) {
            smp.x = s;
            smp.y = 0.0;
        } else {
            smp.x = std::sin(kappa * s) / kappa;
            smp.y = (1.0 - std::cos(kappa * s)) / kappa;
        }
        traj.samples.push_back(smp);
    }
    return traj;
}

}  // namespace

TrajectorySet sample_trajectories(const SamplerConfig& cfg) {
    cfg.validate();
    // One jittered draw per lattice cell; the lattice dims cover `count`.
    const int nk = std::max(1, int(std::ceil(std::cbrt(double(cfg.count)))));
    const int na = std::max(
        1, int(std::ceil(std::sqrt(double(cfg.count) / double(nk)))));
    const int nv = std::max(
        1, int(std::ceil(double(cfg.count) / double(nk) / double(na))));

    std::mt19937_64 rng(cfg.seed);
    TrajectorySet set;
    for (int i = 0; i < cfg.count; ++i) {
        const int iv = i / (na * nk);
        const int ia = (i / nk) % na;
        const int ik = i % nk;
        CandidateParams p;
        p.v0 = cfg.v0_min + (iv + unit(rng)) / nv * (cfg.v0_max - cfg.v0_min);
        p.accel =
            cfg.accel_min + (ia + unit(rng)) / na * (cfg.accel_max - cfg.accel_min);
        p.kappa =
            cfg.kappa_min + (ik + unit(rng)) / nk * (cfg.kappa_max - cfg.kappa_min);
        set.params.push_back(p);
        set.trajectories.push_back(
            integrate_arc(p.v0, p.accel, p.kappa, cfg.steps(), cfg.dt));
    }
    return set;
}

CommandKind classify_command(const Trajectory& traj, double lateral_threshold) {
    traj.validate();
    const double y = traj.endpoint().y;
    if (y > lateral_threshold) return CommandKind::turn_left;
    if (y < -lateral_threshold) return CommandKind::turn_right;
    return CommandKind::forward;
}

double safety_cost(const Trajectory& traj, const BevGrid& bev, const Footprint& fp,
                   double normalization) {
    if (!(normalization > 0.0)) throw Error("safety_cost: normalization must be > 0");
    std::int64_t hits = 0;
    for (const auto& s : traj.samples)
        hits += footprint_overlap(bev, s.x, s.y, s.heading, fp);
    return double(hits) / normalization;
}

double comfort_cost(const Trajectory& traj) {
    const auto& s = traj.samples;
    if (s.size() < 3) throw Error("comfort_cost: need at least 3 samples");
    std::vector<double> accel(s.size() - 1), lateral(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double dt = s[i + 1].t - s[i].t;
        accel[i] = (s[i + 1].speed - s[i].speed) / dt;
        const double yaw_rate = wrap_angle(s[i + 1].heading - s[i].heading) / dt;
        lateral[i] = yaw_rate * s[i].speed;  // kappa * v^2
    }
    double jerk_sq = 0.0;
    for (std::size_t i = 0; i + 1 < accel.size(); ++i) {
        const double dt = s[i + 1].t - s[i].t;
        const double j = (accel[i + 1] - accel[i]) / dt;
        jerk_sq += j * j;
    }
    jerk_sq /= double(accel.size() - 1);
    double lat_sq = 0.0;
    for (double l : lateral) lat_sq += l * l;
    lat_sq /= double(lateral.size());
    return jerk_sq + lat_sq;
}

double progress_cost(const Trajectory& traj) {
    if (traj.samples.empty()) throw Error("progress_cost: empty trajectory");
    return -traj.endpoint().x;
}

namespace {

double resolve_normalization(const CostWeights& w, BevSource source,
                             const BevGrid& bev) {
    const double given =
        source == BevSource::occupancy ? w.norm_occupancy : w.norm_boxes;
    if (given > 0.0) return given;
    return double(std::max<std::size_t>(bev.occupied_count(), 1));
}

}  // namespace

Trajectory select_trajectory(const TrajectorySet& set, const BevGrid& bev,
                             const Command& command, const CostWeights& weights,
                             const Footprint& footprint, BevSource source,
                             CostReport* report) {
    command.validate();
    weights.validate();
    footprint.validate();
    const double norm = resolve_normalization(weights, source, bev);
    CostReport local;
    local.source = source;
    local.normalization = norm;

    int best = -1;
    double best_total = 0.0;
    for (std::size_t i = 0; i < set.trajectories.size(); ++i) {
        const auto& traj = set.trajectories[i];
        const CommandKind kind = classify_command(traj, command.lateral_threshold);
        if (kind != command.kind) continue;
        CandidateCost cc;
        cc.index = int(i);
        cc.command = kind;
        cc.safety = safety_cost(traj, bev, footprint, norm);
        cc.comfort = comfort_cost(traj);
        cc.progress = progress_cost(traj);
        cc.total = weights.safety * cc.safety + weights.comfort * cc.comfort +
                   weights.progress * cc.progress;
        local.candidates.push_back(cc);
        if (best < 0 || cc.total < best_total) {
            best = int(i);
            best_total = cc.total;
        }
    }
    if (best < 0)
        throw NoFeasibleCandidate(std::string("no candidate matches command ") +
                                  command_name(command.kind));
    local.selected = best;
    if (report) *report = std::move(local);
    return set.trajectories[std::size_t(best)];
}

const std::vector<Label>& vehicle_pedestrian_classes() {
    static const std::vector<Label> classes = {2, 3, 4, 5, 6, 7, 9, 10};
    return classes;
}

BevGrid squeeze_to_bev(const VoxelGrid& grid, const std::vector<Label>& keep_classes) {
    std::array<bool, 256> keep{};
    if (keep_classes.empty()) {
        for (Label l = 1; l <= kNumClasses; ++l) keep[l] = true;
    } else {
        for (Label l : keep_classes) {
            if (!is_semantic(l)) throw Error("squeeze_to_bev: non-semantic keep class");
            keep[l] = true;
        }
    }
    const GridSpec& spec = grid.spec;
    BevSpec bspec;
    bspec.origin = {spec.origin.x, spec.origin.y};
    bspec.resolution = spec.resolution;
    bspec.dims_x = spec.dims.x;
    bspec.dims_y = spec.dims.y;
    BevGrid bev(bspec);
    for (int z = 0; z < spec.dims.z; ++z)
        for (int y = 0; y < spec.dims.y; ++y)
            for (int x = 0; x < spec.dims.x; ++x)
                if (keep[grid.labels[spec.flat(x, y, z)]]) bev.at(x, y) = 1;
    return bev;
}

BevGrid boxes_to_bev(const std::vector<Box3D>& boxes, const BevSpec& spec,
                     const std::vector<Label>& keep_classes) {
    std::array<bool, 256> keep{};
    if (keep_classes.empty()) {
        for (Label l = 1; l <= kNumClasses; ++l) keep[l] = true;
    } else {
        for (Label l : keep_classes) {
            if (!is_semantic(l)) throw Error("boxes_to_bev: non-semantic keep class");
            keep[l] = true;
        }
    }
    BevGrid bev(spec);
    for (const auto& box : boxes) {
        if (!keep[box.label]) continue;
        const double hl = box.size.x * 0.5, hw = box.size.y * 0.5;
        const double c = std::cos(box.yaw), s = std::sin(box.yaw);
        const double rx = std::fabs(c) * hl + std::fabs(s) * hw;
        const double ry = std::fabs(s) * hl + std::fabs(c) * hw;
        const int x0 =
            std::max(0, int(std::floor((box.center.x - rx - spec.origin.x) / spec.resolution)));
        const int x1 = std::min(
            spec.dims_x - 1,
            int(std::floor((box.center.x + rx - spec.origin.x) / spec.resolution)));
        const int y0 =
            std::max(0, int(std::floor((box.center.y - ry - spec.origin.y) / spec.resolution)));
        const int y1 = std::min(
            spec.dims_y - 1,
            int(std::floor((box.center.y + ry - spec.origin.y) / spec.resolution)));
        for (int cy = y0; cy <= y1; ++cy)
            for (int cx = x0; cx <= x1; ++cx) {
                const Vec2 cc = spec.cell_center(cx, cy);
                const double dx = cc.x - box.center.x, dy = cc.y - box.center.y;
                const double u = c * dx + s * dy;
                const double v = -s * dx + c * dy;
                if (std::fabs(u) <= hl && std::fabs(v) <= hw) bev.at(cx, cy) = 1;
            }
    }
    return bev;
}

namespace {

PlanResult plan_common(BevGrid bev, BevSource source, const Command& command,
                       const SamplerConfig& sampler, const CostWeights& weights,
                       const Footprint& footprint) {
    PlanResult res;
    res.bev = std::move(bev);
    res.candidates = sample_trajectories(sampler);
    res.trajectory = select_trajectory(res.candidates, res.bev, command, weights,
                                       footprint, source, &res.report);
    return res;
}

}  // namespace

PlanResult plan_from_grid(const VoxelGrid& grid, const std::vector<Label>& keep_classes,
                          const Command& command, const SamplerConfig& sampler,
                          const CostWeights& weights, const Footprint& footprint) {
    return plan_common(squeeze_to_bev(grid, keep_classes), BevSource::occupancy,
                       command, sampler, weights, footprint);
}

PlanResult plan_from_boxes(const std::vector<Box3D>& boxes, const BevSpec& spec,
                           const std::vector<Label>& keep_classes,
                           const Command& command, const SamplerConfig& sampler,
                           const CostWeights& weights, const Footprint& footprint) {
    return plan_common(boxes_to_bev(boxes, spec, keep_classes), BevSource::boxes,
                       command, sampler, weights, footprint);
}

}  // namespace occkit::planner
