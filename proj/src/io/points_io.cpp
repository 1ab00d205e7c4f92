#include <cstring>
#include <filesystem>
#include <fstream>

#include "occkit/io.hpp"

namespace occkit::io {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw Error("read failed on " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out) throw Error("write failed on " + path);
}

namespace {

float load_f32(const std::uint8_t* p) {
    std::uint32_t u = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
                      std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void store_f32(float f, std::vector<std::uint8_t>& out) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    out.push_back(std::uint8_t(u & 0xff));
    out.push_back(std::uint8_t(u >> 8 & 0xff));
    out.push_back(std::uint8_t(u >> 16 & 0xff));
    out.push_back(std::uint8_t(u >> 24 & 0xff));
}

}  // namespace

PointCloud read_points(const std::string& path) {
    const auto bytes = read_file(path);
    if (bytes.size() % 16 != 0)
        throw Error("truncated point record in " + path + " at byte offset " +
                    std::to_string(bytes.size() / 16 * 16));
    PointCloud cloud;
    const std::size_t n = bytes.size() / 16;
    cloud.points.reserve(n);
    cloud.intensity.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* rec = bytes.data() + i * 16;
        Vec3 p{double(load_f32(rec)), double(load_f32(rec + 4)),
               double(load_f32(rec + 8))};
        cloud.points.push_back(p);
        cloud.intensity.push_back(load_f32(rec + 12));
    }
    const std::string sidecar = path + ".labels";
    if (std::filesystem::exists(sidecar)) {
        const auto raw = read_file(sidecar);
        if (raw.size() != n)
            throw Error(sidecar + ": " + std::to_string(raw.size()) +
                        " labels for " + std::to_string(n) + " points");
        cloud.labels.assign(raw.begin(), raw.end());
    }
    return cloud;
}

void write_points(const std::string& path, const PointCloud& cloud) {
    cloud.validate();
    std::vector<std::uint8_t> bytes;
    bytes.reserve(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        store_f32(float(p.x), bytes);
        store_f32(float(p.y), bytes);
        store_f32(float(p.z), bytes);
        store_f32(cloud.intensity.empty() ? 0.0f : cloud.intensity[i], bytes);
    }
    write_file(path, bytes);
    if (!cloud.labels.empty())
        write_file(path + ".labels",
                   std::vector<std::uint8_t>(cloud.labels.begin(), cloud.labels.end()));
}

}  // namespace occkit::io
