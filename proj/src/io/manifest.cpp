#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "occkit/io.hpp"

namespace occkit::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(where + ": " + what);
}

double num(const json& j, const char* key, const std::string& where,
           double fallback, bool required) {
    if (!j.contains(key)) {
        if (required) fail(where, std::string("missing '") + key + "'");
        return fallback;
    }
    if (!j[key].is_number()) fail(where, std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

Vec3 vec3(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
    const json& a = j[key];
    if (!a.is_array() || a.size() != 3)
        fail(where, std::string("'") + key + "' must be an array of 3 numbers");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

Vec2 vec2(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
    const json& a = j[key];
    if (!a.is_array() || a.size() != 2)
        fail(where, std::string("'") + key + "' must be an array of 2 numbers");
    return {a[0].get<double>(), a[1].get<double>()};
}

Pose parse_pose(const json& j, const char* key, const std::string& where,
                std::int64_t t_us) {
    Pose pose;
    pose.timestamp_us = t_us;
    if (!j.contains(key)) return pose;
    const json& p = j[key];
    const std::string ctx = where + ": " + key;
    if (!p.is_object()) fail(ctx, "must be an object");
    pose.translation = vec3(p, "translation", ctx);
    if (!p.contains("rotation")) fail(ctx, "missing 'rotation'");
    const json& r = p["rotation"];
    if (!r.is_array() || r.size() != 4)
        fail(ctx, "'rotation' must be a quaternion [w, x, y, z]");
    pose.rotation = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                     r[3].get<double>()};
    try {
        pose.validate();
    } catch (const Error& e) {
        fail(ctx, e.what());
    }
    return pose;
}

json dump_pose(const Pose& pose) {
    return json{{"translation", {pose.translation.x, pose.translation.y,
                                 pose.translation.z}},
                {"rotation", {pose.rotation.w, pose.rotation.x, pose.rotation.y,
                              pose.rotation.z}}};
}

Box3D parse_box(const json& b, const std::string& where, std::int64_t t_us) {
    if (!b.is_object()) fail(where, "must be an object");
    Box3D box;
    box.center = vec3(b, "center", where);
    box.size = vec3(b, "size", where);
    box.yaw = num(b, "yaw", where, 0.0, true);
    box.velocity = vec2(b, "velocity", where);
    if (!b.contains("class") || !b["class"].is_string())
        fail(where, "missing 'class' name");
    try {
        box.label = class_code(b["class"].get<std::string>());
    } catch (const Error& e) {
        fail(where, e.what());
    }
    if (!b.contains("track_id") || !b["track_id"].is_number_unsigned())
        fail(where, "missing unsigned 'track_id'");
    box.track_id = b["track_id"].get<std::uint64_t>();
    box.timestamp_us = t_us;
    try {
        box.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return box;
}

kernels::CameraModel parse_camera(const json& c, const std::string& where,
                                  std::int64_t t_us) {
    if (!c.is_object()) fail(where, "must be an object");
    kernels::CameraModel cam;
    cam.fx = num(c, "fx", where, 0.0, true);
    cam.fy = num(c, "fy", where, 0.0, true);
    cam.cx = num(c, "cx", where, 0.0, true);
    cam.cy = num(c, "cy", where, 0.0, true);
    cam.width = int(num(c, "width", where, 0.0, true));
    cam.height = int(num(c, "height", where, 0.0, true));
    cam.extrinsic = parse_pose(c, "extrinsic", where, t_us);
    try {
        cam.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return cam;
}

}  // namespace

std::vector<occgen::Frame> read_manifest(const std::string& path) {
    json doc;
    {
        std::ifstream in(path);
        if (!in) throw Error("cannot open " + path);
        try {
            doc = json::parse(in);
        } catch (const std::exception& e) {
            throw Error(path + ": " + e.what());
        }
    }
    if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array())
        throw Error(path + ": expected an object with a 'frames' array");

    const auto base = std::filesystem::path(path).parent_path();
    std::vector<occgen::Frame> frames;
    std::int64_t prev_ts = 0;
    std::size_t idx = 0;
    for (const json& f : doc["frames"]) {
        const std::string where = "frame " + std::to_string(idx);
        if (!f.is_object()) fail(where, "must be an object");
        occgen::Frame frame;
        frame.timestamp_us =
            std::int64_t(num(f, "timestamp_us", where, 0.0, false));
        if (idx > 0 && frame.timestamp_us <= prev_ts)
            fail(where, "timestamps must increase");
        prev_ts = frame.timestamp_us;
        frame.is_key_frame =
            !f.contains("is_key_frame") || f["is_key_frame"].get<bool>();
        frame.ego_pose = parse_pose(f, "ego_pose", where, frame.timestamp_us);
        frame.sensor_pose = parse_pose(f, "sensor_pose", where, frame.timestamp_us);
        if (f.contains("points")) {
            if (!f["points"].is_string()) fail(where, "'points' must be a path");
            const auto rel = f["points"].get<std::string>();
            frame.point_cloud = read_points((base / rel).string());
        }
        frame.point_cloud.timestamp_us = frame.timestamp_us;
        if (f.contains("boxes")) {
            if (!f["boxes"].is_array()) fail(where, "'boxes' must be an array");
            std::size_t bi = 0;
            for (const json& b : f["boxes"])
                frame.boxes.push_back(
                    parse_box(b, where + ": box " + std::to_string(bi++),
                              frame.timestamp_us));
        }
        if (f.contains("cameras")) {
            if (!f["cameras"].is_array()) fail(where, "'cameras' must be an array");
            std::size_t ci = 0;
            for (const json& c : f["cameras"])
                frame.cameras.push_back(
                    parse_camera(c, where + ": camera " + std::to_string(ci++),
                                 frame.timestamp_us));
        }
        frames.push_back(std::move(frame));
        ++idx;
    }
    return frames;
}

std::string write_manifest(const std::string& dir,
                           const std::vector<occgen::Frame>& frames) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json out;
    out["frames"] = json::array();
    char name[32];
    std::size_t idx = 0;
    for (const auto& frame : frames) {
        json f;
        f["timestamp_us"] = frame.timestamp_us;
        f["is_key_frame"] = frame.is_key_frame;
        f["ego_pose"] = dump_pose(frame.ego_pose);
        f["sensor_pose"] = dump_pose(frame.sensor_pose);
        if (!frame.point_cloud.points.empty()) {
            std::snprintf(name, sizeof name, "frame_%06zu.bin", idx);
            write_points((fs::path(dir) / name).string(), frame.point_cloud);
            f["points"] = name;
        }
        if (!frame.boxes.empty()) {
            f["boxes"] = json::array();
            for (const auto& b : frame.boxes)
                f["boxes"].push_back(
                    json{{"center", {b.center.x, b.center.y, b.center.z}},
                         {"size", {b.size.x, b.size.y, b.size.z}},
                         {"yaw", b.yaw},
                         {"velocity", {b.velocity.x, b.velocity.y}},
                         {"class", class_name(b.label)},
                         {"track_id", b.track_id}});
        }
        if (!frame.cameras.empty()) {
            f["cameras"] = json::array();
            for (const auto& c : frame.cameras)
                f["cameras"].push_back(json{{"fx", c.fx},
                                            {"fy", c.fy},
                                            {"cx", c.cx},
                                            {"cy", c.cy},
                                            {"width", c.width},
                                            {"height", c.height},
                                            {"extrinsic", dump_pose(c.extrinsic)}});
        }
        out["frames"].push_back(std::move(f));
        ++idx;
    }
    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    std::ofstream os(manifest_path);
    if (!os) throw Error("cannot open " + manifest_path + " for writing");
    os << out.dump(2) << '\n';
    if (!os) throw Error("write failed on " + manifest_path);
    return manifest_path;
}

}  // namespace occkit::io
