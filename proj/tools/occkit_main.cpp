#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occkit/io.hpp"
#include "occkit/kernels/selftest.hpp"
#include "occkit/metrics.hpp"
#include "occkit/occgen.hpp"
#include "occkit/planner.hpp"
#include "occkit/simd/kernels.hpp"
#include "occkit/synth.hpp"

namespace {

using nlohmann::json;
using namespace occkit;

constexpr const char* kVersion = "0.1.0";

class Timer {
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }
};

json versions_json() {
    return json{{"occkit", kVersion},
                {"occ1_format", int(io::kOcc1Version)},
                {"simd", simd::active_name()}};
}

void emit_report(json report, const std::string& path) {
    report["versions"] = versions_json();
    if (path.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        std::ofstream os(path);
        if (!os) throw Error("cannot open " + path + " for writing");
        os << report.dump(2) << '\n';
    }
}

GridSpec spec_from_flags(const std::vector<int>& dims,
                         const std::vector<double>& origin, double res) {
    GridSpec g;
    g.dims = {dims[0], dims[1], dims[2]};
    g.origin = {origin[0], origin[1], origin[2]};
    g.resolution = res;
    g.validate();
    return g;
}

json miou_json(const metrics::MiouResult& r) {
    json per = json::object();
    for (int c = 1; c <= kNumClasses; ++c)
        if (r.present[c]) per[class_name(Label(c))] = r.per_class[c];
    return json{{"miou", r.value},
                {"present_classes", r.present_count},
                {"per_class", per}};
}

json eval_grids(const VoxelGrid& pred, const VoxelGrid& gt) {
    json out;
    {
        const auto cm = metrics::confusion_accumulate(pred, gt, {});
        json side = miou_json(metrics::miou(cm));
        side["iou_geo"] = metrics::iou_geo(cm);
        side["evaluated_voxels"] = cm.evaluated;
        out["all"] = std::move(side);
    }
    if (gt.has_visibility()) {
        metrics::EvalMask mask;
        mask.policy = metrics::MaskPolicy::visible_only;
        const auto cm = metrics::confusion_accumulate(pred, gt, mask);
        json side = miou_json(metrics::miou(cm));
        side["iou_geo"] = metrics::iou_geo(cm);
        side["evaluated_voxels"] = cm.evaluated;
        out["visible_only"] = std::move(side);
    } else {
        out["visible_only"] = nullptr;
    }
    return out;
}

json trajectory_json(const Trajectory& t) {
    json samples = json::array();
    for (const auto& s : t.samples)
        samples.push_back(json{{"t", s.t},
                               {"x", s.x},
                               {"y", s.y},
                               {"heading", s.heading},
                               {"speed", s.speed}});
    return json{{"samples", std::move(samples)}};
}

Trajectory trajectory_from_json(const json& j, const std::string& where) {
    if (!j.contains("samples") || !j["samples"].is_array())
        throw Error(where + ": expected a 'samples' array");
    Trajectory t;
    for (const json& s : j["samples"]) {
        TrajectorySample ts;
        ts.t = s.at("t").get<double>();
        ts.x = s.at("x").get<double>();
        ts.y = s.at("y").get<double>();
        ts.heading = s.at("heading").get<double>();
        ts.speed = s.at("speed").get<double>();
        t.samples.push_back(ts);
    }
    t.validate();
    return t;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<std::string> occ_inputs(const std::string& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw Error(path + " does not exist");
    if (!fs::is_directory(path)) return {path};
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path))
        if (e.path().extension() == ".occ") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .occ files in " + path);
    return files;
}

const std::vector<Label>& keep_set(const std::string& keep) {
    static const std::vector<Label> all;
    if (keep == "all") return all;
    if (keep == "vehicles") return planner::vehicle_pedestrian_classes();
    throw Error("--keep must be 'all' or 'vehicles'");
}

struct GenerateOpts {
    std::string manifest, out_dir, report;
    std::vector<int> dims{200, 200, 16};
    std::vector<double> origin{-50.0, -50.0, -5.0};
    double resolution = 0.5;
    int threads = 1;
    int min_points = 1;
    int densify_radius = 1;
    int densify_min_neighbors = 1;
    int fill_min_neighbors = 5;
    double velocity_threshold = 0.2;
    bool no_visibility = false;
};

void run_generate(const GenerateOpts& o) {
    Timer timer;
    const auto frames = io::read_manifest(o.manifest);
    occgen::GenConfig cfg;
    cfg.grid = spec_from_flags(o.dims, o.origin, o.resolution);
    cfg.flow.velocity_threshold = o.velocity_threshold;
    cfg.min_points_per_voxel = o.min_points;
    cfg.densify_neighborhood = o.densify_radius;
    cfg.densify_min_neighbors = o.densify_min_neighbors;
    cfg.hole_fill_min_neighbors = o.fill_min_neighbors;
    cfg.compute_visibility = !o.no_visibility;
    cfg.threads = o.threads;
    const double parse_ms = timer.ms();

    const auto result = occgen::generate_scene(frames, cfg);
    std::filesystem::create_directories(o.out_dir);
    json outputs = json::array();
    char name[32];
    for (std::size_t i = 0; i < result.grids.size(); ++i) {
        std::snprintf(name, sizeof name, "occ_%06zu.occ", i);
        const auto path = (std::filesystem::path(o.out_dir) / name).string();
        io::write_occ(path, result.grids[i]);
        outputs.push_back(json{{"path", path},
                               {"timestamp_us", result.timestamps_us[i]},
                               {"occupied", result.stats.occupied_per_frame[i]}});
    }
    emit_report(
        json{{"command", "generate"},
             {"config",
              {{"manifest", o.manifest},
               {"out", o.out_dir},
               {"dims", o.dims},
               {"origin", o.origin},
               {"resolution", o.resolution},
               {"threads", o.threads},
               {"min_points", o.min_points},
               {"visibility", !o.no_visibility}}},
             {"outputs", outputs},
             {"stats",
              {{"frames", frames.size()},
               {"key_frames", result.grids.size()},
               {"dropped_points", result.stats.dropped_points},
               {"densified_voxels", result.stats.densified_voxels},
               {"filled_voxels", result.stats.filled_voxels}}},
             {"timings", {{"parse_ms", parse_ms}, {"total_ms", timer.ms()}}}},
        o.report);
}

struct EvalOccOpts {
    std::string pred, gt, report;
};

void run_eval_occ(const EvalOccOpts& o) {
    Timer timer;
    const auto pred = io::read_occ(o.pred);
    const auto gt = io::read_occ(o.gt);
    json results = eval_grids(pred, gt);
    emit_report(json{{"command", "eval-occ"},
                     {"config", {{"pred", o.pred}, {"gt", o.gt}}},
                     {"results", std::move(results)},
                     {"timings", {{"total_ms", timer.ms()}}}},
                o.report);
}

struct EvalSegOpts {
    std::string points, occ, report;
};

void run_eval_seg(const EvalSegOpts& o) {
    Timer timer;
    const auto cloud = io::read_points(o.points);
    if (cloud.labels.empty())
        throw Error(o.points + ": no label sidecar; eval-seg needs reference labels");
    const auto grid = io::read_occ(o.occ);
    const auto transferred = metrics::lidar_seg_transfer(cloud, grid);
    const auto cm = metrics::point_confusion(transferred, cloud.labels);
    std::size_t outside = 0;
    for (Label l : transferred)
        if (l == kUnknown) ++outside;
    json results = miou_json(metrics::miou(cm));
    results["points"] = cloud.size();
    results["out_of_volume"] = outside;
    emit_report(json{{"command", "eval-seg"},
                     {"config", {{"points", o.points}, {"occ", o.occ}}},
                     {"results", std::move(results)},
                     {"timings", {{"total_ms", timer.ms()}}}},
                o.report);
}

struct PlanOpts {
    std::string occ, boxes_manifest, report, out_traj;
    int frame = 0;
    std::string keep = "all";
    std::string command = "forward";
    std::vector<int> dims{200, 200, 16};
    std::vector<double> origin{-50.0, -50.0, -5.0};
    double resolution = 0.5;
    int count = 64;
    double horizon = 3.0, dt = 0.25;
    std::uint64_t seed = 0;
    double w_safety = 1000.0, w_comfort = 1.0, w_progress = 1.0;
    double norm = 0.0;
    double fp_length = 4.1, fp_width = 1.8;
};

planner::Command parse_command(const std::string& name) {
    planner::Command cmd;
    if (name == "forward") cmd.kind = planner::CommandKind::forward;
    else if (name == "left") cmd.kind = planner::CommandKind::turn_left;
    else if (name == "right") cmd.kind = planner::CommandKind::turn_right;
    else throw Error("--command must be forward, left or right");
    return cmd;
}

void run_plan(const PlanOpts& o) {
    Timer timer;
    if (o.occ.empty() == o.boxes_manifest.empty())
        throw Error("plan needs exactly one of --occ or --boxes");
    planner::SamplerConfig sampler;
    sampler.count = o.count;
    sampler.horizon = o.horizon;
    sampler.dt = o.dt;
    sampler.seed = o.seed;
    planner::CostWeights weights;
    weights.safety = o.w_safety;
    weights.comfort = o.w_comfort;
    weights.progress = o.w_progress;
    weights.norm_occupancy = o.norm;
    weights.norm_boxes = o.norm;
    Footprint fp{o.fp_length, o.fp_width};
    const auto cmd = parse_command(o.command);
    const auto& keep = keep_set(o.keep);

    planner::PlanResult result;
    if (!o.occ.empty()) {
        result = planner::plan_from_grid(io::read_occ(o.occ), keep, cmd, sampler,
                                         weights, fp);
    } else {
        const auto frames = io::read_manifest(o.boxes_manifest);
        if (o.frame < 0 || std::size_t(o.frame) >= frames.size())
            throw Error("--frame out of range");
        const auto& fr = frames[std::size_t(o.frame)];
        const Pose ego_inv = fr.ego_pose.inverse();
        std::vector<Box3D> boxes;
        for (const auto& b : fr.boxes) boxes.push_back(transform_box(ego_inv, b));
        const GridSpec g = spec_from_flags(o.dims, o.origin, o.resolution);
        BevSpec bev{{g.origin.x, g.origin.y}, g.resolution, g.dims.x, g.dims.y};
        result = planner::plan_from_boxes(boxes, bev, keep, cmd, sampler, weights, fp);
    }

    json cand = json::array();
    for (const auto& c : result.report.candidates)
        cand.push_back(json{{"index", c.index},
                            {"safety", c.safety},
                            {"comfort", c.comfort},
                            {"progress", c.progress},
                            {"total", c.total}});
    json out{{"command", "plan"},
             {"config",
              {{"source", o.occ.empty() ? "boxes" : "occupancy"},
               {"keep", o.keep},
               {"drive_command", o.command},
               {"count", o.count},
               {"horizon", o.horizon},
               {"dt", o.dt},
               {"seed", o.seed},
               {"weights",
                {{"safety", o.w_safety},
                 {"comfort", o.w_comfort},
                 {"progress", o.w_progress}}},
               {"footprint", {o.fp_length, o.fp_width}}}},
             {"results",
              {{"selected", result.report.selected},
               {"normalization", result.report.normalization},
               {"cost_forms", result.report.forms},
               {"trajectory", trajectory_json(result.trajectory)},
               {"candidates_considered", cand.size()}}},
             {"candidates", std::move(cand)},
             {"timings", {{"total_ms", timer.ms()}}}};
    if (!o.out_traj.empty()) {
        std::ofstream os(o.out_traj);
        if (!os) throw Error("cannot open " + o.out_traj + " for writing");
        os << trajectory_json(result.trajectory).dump(2) << '\n';
    }
    emit_report(std::move(out), o.report);
}

struct EvalPlanOpts {
    std::string traj, occ, gt_traj, report;
    std::string keep = "all";
    std::vector<double> horizons{1.0, 2.0, 3.0};
    double fp_length = 4.1, fp_width = 1.8;
};

void run_eval_plan(const EvalPlanOpts& o) {
    Timer timer;
    const auto traj = trajectory_from_json(load_json(o.traj), o.traj);
    const auto grid = io::read_occ(o.occ);
    const auto bev = planner::squeeze_to_bev(grid, keep_set(o.keep));
    const auto cr = metrics::collision_rate({traj}, bev, {o.fp_length, o.fp_width},
                                            o.horizons);
    json results{{"horizons", o.horizons}, {"collision_rate", cr.rate}};
    if (!o.gt_traj.empty()) {
        const auto gt = trajectory_from_json(load_json(o.gt_traj), o.gt_traj);
        results["l2"] = metrics::planning_l2(traj, gt, o.horizons);
    }
    emit_report(json{{"command", "eval-plan"},
                     {"config",
                      {{"traj", o.traj},
                       {"occ", o.occ},
                       {"keep", o.keep},
                       {"footprint", {o.fp_length, o.fp_width}}}},
                     {"results", std::move(results)},
                     {"timings", {{"total_ms", timer.ms()}}}},
                o.report);
}

struct RasterOpts {
    std::string occ, report;
    std::string keep = "all";
};

void run_raster(const RasterOpts& o) {
    Timer timer;
    const auto grid = io::read_occ(o.occ);
    const auto bev = planner::squeeze_to_bev(grid, keep_set(o.keep));
    json rows = json::array();
    for (int y = 0; y < bev.spec.dims_y; ++y) {
        std::string row(std::size_t(bev.spec.dims_x), '0');
        for (int x = 0; x < bev.spec.dims_x; ++x)
            if (bev.at(x, y)) row[std::size_t(x)] = '1';
        rows.push_back(std::move(row));
    }
    emit_report(json{{"command", "raster"},
                     {"config", {{"occ", o.occ}, {"keep", o.keep}}},
                     {"results",
                      {{"dims", {bev.spec.dims_x, bev.spec.dims_y}},
                       {"origin", {bev.spec.origin.x, bev.spec.origin.y}},
                       {"resolution", bev.spec.resolution},
                       {"occupied_cells", bev.occupied_count()},
                       {"rows", std::move(rows)}}},
                     {"timings", {{"total_ms", timer.ms()}}}},
                o.report);
}

struct StatsOpts {
    std::string occ, report;
    double velocity_threshold = 0.2;
};

void run_stats(const StatsOpts& o) {
    Timer timer;
    const auto files = occ_inputs(o.occ);
    std::array<std::uint64_t, kNumClasses + 1> count{}, moving{};
    std::uint64_t total = 0, occupied = 0, unknown = 0;
    for (const auto& f : files) {
        const auto grid = io::read_occ(f);
        total += grid.spec.voxel_count();
        for (std::size_t i = 0; i < grid.labels.size(); ++i) {
            const Label l = grid.labels[i];
            if (l == kFree) continue;
            ++occupied;
            if (l == kUnknown) {
                ++unknown;
                continue;
            }
            ++count[l];
            if (grid.has_flow()) {
                const double fx = grid.flow[i * 2], fy = grid.flow[i * 2 + 1];
                if (std::sqrt(fx * fx + fy * fy) >= o.velocity_threshold)
                    ++moving[l];
            }
        }
    }
    json per = json::object();
    for (int c = 1; c <= kNumClasses; ++c) {
        if (!count[c]) continue;
        per[class_name(Label(c))] =
            json{{"voxels", count[c]},
                 {"fraction_of_occupied", double(count[c]) / double(occupied)},
                 {"fraction_of_volume", double(count[c]) / double(total)},
                 {"moving_fraction", double(moving[c]) / double(count[c])}};
    }
    emit_report(
        json{{"command", "stats"},
             {"config",
              {{"occ", o.occ}, {"velocity_threshold", o.velocity_threshold}}},
             {"results",
              {{"files", files.size()},
               {"voxels", total},
               {"occupied", occupied},
               {"unknown", unknown},
               {"free_fraction", double(total - occupied) / double(total)},
               {"per_class", std::move(per)}}},
             {"timings", {{"total_ms", timer.ms()}}}},
        o.report);
}

struct SelftestOpts {
    std::string report;
    std::uint64_t seed = 0;
};

int run_selftest_cmd(const SelftestOpts& o) {
    Timer timer;
    const auto rep = kernels::run_selftest(o.seed);
    json items = json::array();
    bool ok = true;
    for (const auto& r : rep.items) {
        std::printf("%-28s %s%s%s\n", r.name.c_str(), r.pass ? "ok" : "FAIL",
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        items.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        ok = ok && r.pass;
    }
    if (!o.report.empty())
        emit_report(json{{"command", "kernels-selftest"},
                         {"config", {{"seed", o.seed}}},
                         {"results", {{"pass", ok}, {"checks", std::move(items)}}},
                         {"timings", {{"total_ms", timer.ms()}}}},
                    o.report);
    return ok ? 0 : 1;
}

struct SynthOpts {
    std::string scenario = "moving";
    std::string out_dir, report;
    std::uint64_t seed = 0;
    int keys = 3, sweeps = 1;
    double dropout = 0.0, noise = 0.0;
    double resolution = 0.5;
    bool no_cameras = false;
};

void run_synth(const SynthOpts& o) {
    Timer timer;
    synth::SynthConfig cfg;
    if (o.scenario == "static") cfg.scenario = synth::Scenario::static_scene;
    else if (o.scenario == "moving") cfg.scenario = synth::Scenario::moving;
    else if (o.scenario == "protrusion") cfg.scenario = synth::Scenario::protrusion;
    else throw Error("--scenario must be static, moving or protrusion");
    cfg.seed = o.seed;
    cfg.key_frames = o.keys;
    cfg.sweeps_per_gap = o.sweeps;
    cfg.dropout = o.dropout;
    cfg.noise = o.noise;
    cfg.with_cameras = !o.no_cameras;
    if (cfg.scenario == synth::Scenario::protrusion)
        cfg.grid = synth::protrusion_grid(o.resolution);

    const auto scene = synth::synth_scene(cfg);
    const auto manifest = io::write_manifest(o.out_dir, scene.frames);
    json gts = json::array();
    char name[32];
    for (std::size_t i = 0; i < scene.gt.size(); ++i) {
        std::snprintf(name, sizeof name, "gt_%06zu.occ", i);
        const auto path = (std::filesystem::path(o.out_dir) / name).string();
        io::write_occ(path, scene.gt[i]);
        gts.push_back(path);
    }
    std::size_t points = 0;
    for (const auto& f : scene.frames) points += f.point_cloud.size();
    emit_report(json{{"command", "synth"},
                     {"config",
                      {{"scenario", o.scenario},
                       {"seed", o.seed},
                       {"keys", o.keys},
                       {"sweeps", o.sweeps},
                       {"dropout", o.dropout},
                       {"noise", o.noise}}},
                     {"results",
                      {{"manifest", manifest},
                       {"gt", std::move(gts)},
                       {"frames", scene.frames.size()},
                       {"points", points}}},
                     {"timings", {{"total_ms", timer.ms()}}}},
                o.report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D occupancy toolkit: scene generation, evaluation and planning"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");
    app.set_version_flag("--version", kVersion);

    GenerateOpts gen;
    auto* cmd_gen = app.add_subcommand("generate", "occupancy grids from a manifest");
    cmd_gen->add_option("--manifest", gen.manifest, "scene manifest")->required();
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
    cmd_gen->add_option("--dims", gen.dims, "grid cells x y z")->expected(3);
    cmd_gen->add_option("--origin", gen.origin, "grid min corner x y z")->expected(3);
    cmd_gen->add_option("--resolution", gen.resolution, "cell size, m");
    cmd_gen->add_option("--threads", gen.threads, "worker count")
        ->envname("OCCKIT_THREADS");
    cmd_gen->add_option("--min-points", gen.min_points, "labeled points per voxel");
    cmd_gen->add_option("--densify-radius", gen.densify_radius, "");
    cmd_gen->add_option("--densify-min-neighbors", gen.densify_min_neighbors, "");
    cmd_gen->add_option("--fill-min-neighbors", gen.fill_min_neighbors, "");
    cmd_gen->add_option("--velocity-threshold", gen.velocity_threshold, "m/s");
    cmd_gen->add_flag("--no-visibility", gen.no_visibility, "skip the camera mask");
    cmd_gen->add_option("--report", gen.report, "write the JSON report here");
    cmd_gen->callback([&] { run_generate(gen); });

    EvalOccOpts eo;
    auto* cmd_eo = app.add_subcommand("eval-occ", "compare two occupancy files");
    cmd_eo->add_option("--pred", eo.pred, "")->required();
    cmd_eo->add_option("--gt", eo.gt, "")->required();
    cmd_eo->add_option("--report", eo.report, "");
    cmd_eo->callback([&] { run_eval_occ(eo); });

    EvalSegOpts es;
    auto* cmd_es = app.add_subcommand("eval-seg", "point labels via the grid");
    cmd_es->add_option("--points", es.points, "points file with label sidecar")
        ->required();
    cmd_es->add_option("--occ", es.occ, "")->required();
    cmd_es->add_option("--report", es.report, "");
    cmd_es->callback([&] { run_eval_seg(es); });

    PlanOpts po;
    auto* cmd_plan = app.add_subcommand("plan", "select a trajectory");
    cmd_plan->add_option("--occ", po.occ, "occupancy source");
    cmd_plan->add_option("--boxes", po.boxes_manifest, "manifest for box source");
    cmd_plan->add_option("--frame", po.frame, "manifest frame index");
    cmd_plan->add_option("--keep", po.keep, "all|vehicles");
    cmd_plan->add_option("--command", po.command, "forward|left|right");
    cmd_plan->add_option("--dims", po.dims, "")->expected(3);
    cmd_plan->add_option("--origin", po.origin, "")->expected(3);
    cmd_plan->add_option("--resolution", po.resolution, "");
    cmd_plan->add_option("--count", po.count, "candidates");
    cmd_plan->add_option("--horizon", po.horizon, "s");
    cmd_plan->add_option("--dt", po.dt, "s");
    cmd_plan->add_option("--seed", po.seed, "");
    cmd_plan->add_option("--w-safety", po.w_safety, "");
    cmd_plan->add_option("--w-comfort", po.w_comfort, "");
    cmd_plan->add_option("--w-progress", po.w_progress, "");
    cmd_plan->add_option("--norm", po.norm, "safety norm, 0 = occupied count");
    cmd_plan->add_option("--fp-length", po.fp_length, "m");
    cmd_plan->add_option("--fp-width", po.fp_width, "m");
    cmd_plan->add_option("--out", po.out_traj, "write the trajectory here");
    cmd_plan->add_option("--report", po.report, "");
    cmd_plan->callback([&] { run_plan(po); });

    EvalPlanOpts ep;
    auto* cmd_ep = app.add_subcommand("eval-plan", "score a trajectory");
    cmd_ep->add_option("--traj", ep.traj, "trajectory JSON")->required();
    cmd_ep->add_option("--occ", ep.occ, "occupancy truth")->required();
    cmd_ep->add_option("--gt-traj", ep.gt_traj, "reference trajectory for L2");
    cmd_ep->add_option("--keep", ep.keep, "all|vehicles");
    cmd_ep->add_option("--horizons", ep.horizons, "s")->expected(-1);
    cmd_ep->add_option("--fp-length", ep.fp_length, "m");
    cmd_ep->add_option("--fp-width", ep.fp_width, "m");
    cmd_ep->add_option("--report", ep.report, "");
    cmd_ep->callback([&] { run_eval_plan(ep); });

    RasterOpts ro;
    auto* cmd_ro = app.add_subcommand("raster", "BEV occupancy as JSON");
    cmd_ro->add_option("--occ", ro.occ, "")->required();
    cmd_ro->add_option("--keep", ro.keep, "all|vehicles");
    cmd_ro->add_option("--report", ro.report, "");
    cmd_ro->callback([&] { run_raster(ro); });

    StatsOpts so;
    auto* cmd_so = app.add_subcommand("stats", "per-class voxel statistics");
    cmd_so->add_option("--occ", so.occ, ".occ file or directory")->required();
    cmd_so->add_option("--velocity-threshold", so.velocity_threshold, "m/s");
    cmd_so->add_option("--report", so.report, "");
    cmd_so->callback([&] { run_stats(so); });

    SelftestOpts ko;
    int selftest_rc = 0;
    auto* cmd_ko = app.add_subcommand("kernels-selftest", "numeric kernel checks");
    cmd_ko->add_option("--seed", ko.seed, "");
    cmd_ko->add_option("--report", ko.report, "");
    cmd_ko->callback([&] { selftest_rc = run_selftest_cmd(ko); });

    SynthOpts yo;
    auto* cmd_yo = app.add_subcommand("synth", "procedural scene with analytic GT");
    cmd_yo->add_option("--scenario", yo.scenario, "static|moving|protrusion");
    cmd_yo->add_option("--out", yo.out_dir, "output directory")->required();
    cmd_yo->add_option("--seed", yo.seed, "");
    cmd_yo->add_option("--keys", yo.keys, "key frames");
    cmd_yo->add_option("--sweeps", yo.sweeps, "sweeps between keys");
    cmd_yo->add_option("--dropout", yo.dropout, "");
    cmd_yo->add_option("--noise", yo.noise, "sigma, m");
    cmd_yo->add_option("--resolution", yo.resolution, "protrusion grid, m");
    cmd_yo->add_flag("--no-cameras", yo.no_cameras, "");
    cmd_yo->add_option("--report", yo.report, "");
    cmd_yo->callback([&] { run_synth(yo); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
    return selftest_rc;
}
