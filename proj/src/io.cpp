#include "liqrec/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace liqrec {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return in;
}

} // namespace

void save_particles(const ParticleState& state, const std::string& path) {
    std::ofstream out = open_out(path);
    out.precision(17);
    out << "particles " << state.size() << "\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Vec3& p = state.positions[i];
        const Vec3& v = state.velocities[i];
        const Vec3& q = state.prev_positions[i];
        out << p.x << " " << p.y << " " << p.z << " " << v.x << " " << v.y << " " << v.z
            << " " << q.x << " " << q.y << " " << q.z << "\n";
    }
}

ParticleState load_particles(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string tag;
    std::size_t n = 0;
    if (!(in >> tag >> n) || tag != "particles")
        parse_fail(path, "malformed header, expected 'particles N'");
    ParticleState state;
    state.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 p, v, q;
        if (!(in >> p.x >> p.y >> p.z >> v.x >> v.y >> v.z >> q.x >> q.y >> q.z))
            parse_fail(path, "record " + std::to_string(i) + " truncated or non-numeric");
        if (!p.finite() || !v.finite() || !q.finite())
            parse_fail(path, "record " + std::to_string(i) + " contains non-finite values");
        state.append(p, v, q);
    }
    return state;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    std::ofstream out = open_out(path, std::ios::binary);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<std::uint8_t> bytes(mask.values.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.values[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

BinaryMask load_mask(const std::string& path) {
    std::ifstream in = open_in(path, std::ios::binary);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5") parse_fail(path, "wrong magic, expected P5");
    if (w < 1 || h < 1) parse_fail(path, "bad dimensions");
    if (maxval != 255) parse_fail(path, "expected 8-bit maxval 255");
    in.get(); // single whitespace after header
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        parse_fail(path, "truncated pixel data");
    BinaryMask mask(w, h);
    for (std::size_t i = 0; i < bytes.size(); ++i) mask.values[i] = bytes[i] >= 128 ? 1 : 0;
    return mask;
}

namespace {

void write_camera(std::ostream& out, const PinholeCamera& cam) {
    out << cam.fx << " " << cam.fy << " " << cam.cx << " " << cam.cy << " " << cam.width
        << " " << cam.height << "\n";
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out << cam.rotation.m[3 * r + c] << " ";
        out << cam.translation[static_cast<std::size_t>(r)] << "\n";
    }
}

PinholeCamera read_camera(std::istream& in, const std::string& path) {
    PinholeCamera cam;
    if (!(in >> cam.fx >> cam.fy >> cam.cx >> cam.cy >> cam.width >> cam.height))
        parse_fail(path, "malformed camera intrinsics line");
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c)
            if (!(in >> cam.rotation.m[3 * r + c])) parse_fail(path, "malformed camera pose");
        if (!(in >> cam.translation[static_cast<std::size_t>(r)]))
            parse_fail(path, "malformed camera pose");
    }
    cam.validate();
    return cam;
}

} // namespace

void save_camera(const PinholeCamera& cam, const std::string& path) {
    std::ofstream out = open_out(path);
    out.precision(17);
    out << "cameras 1\n";
    write_camera(out, cam);
}

PinholeCamera load_camera(const std::string& path) {
    auto cams = load_cameras(path);
    if (cams.empty()) parse_fail(path, "no cameras in file");
    return cams.front();
}

void save_cameras(const std::vector<PinholeCamera>& cams, const std::string& path) {
    std::ofstream out = open_out(path);
    out.precision(17);
    out << "cameras " << cams.size() << "\n";
    for (const auto& cam : cams) write_camera(out, cam);
}

std::vector<PinholeCamera> load_cameras(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string tag;
    std::size_t n = 0;
    if (!(in >> tag >> n) || tag != "cameras")
        parse_fail(path, "malformed header, expected 'cameras N'");
    std::vector<PinholeCamera> cams;
    cams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) cams.push_back(read_camera(in, path));
    return cams;
}

void save_sdf(const VoxelSDF& sdf, const std::string& path) {
    std::ofstream out = open_out(path, std::ios::binary);
    out.write("VSDF1", 5);
    auto write_u32 = [&](std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), 4);
    };
    auto write_f32 = [&](float v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    write_u32(static_cast<std::uint32_t>(sdf.nx));
    write_u32(static_cast<std::uint32_t>(sdf.ny));
    write_u32(static_cast<std::uint32_t>(sdf.nz));
    write_f32(static_cast<float>(sdf.origin.x));
    write_f32(static_cast<float>(sdf.origin.y));
    write_f32(static_cast<float>(sdf.origin.z));
    write_f32(static_cast<float>(sdf.resolution));
    out.write(reinterpret_cast<const char*>(sdf.values.data()),
              static_cast<std::streamsize>(sdf.values.size() * sizeof(float)));
}

VoxelSDF load_sdf(const std::string& path) {
    std::ifstream in = open_in(path, std::ios::binary);
    char magic[5];
    in.read(magic, 5);
    if (in.gcount() != 5 || std::memcmp(magic, "VSDF1", 5) != 0)
        parse_fail(path, "wrong magic, expected VSDF1");
    auto read_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto read_f32 = [&]() {
        float v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    VoxelSDF sdf;
    sdf.nx = static_cast<int>(read_u32());
    sdf.ny = static_cast<int>(read_u32());
    sdf.nz = static_cast<int>(read_u32());
    sdf.origin = {read_f32(), read_f32(), read_f32()};
    sdf.resolution = read_f32();
    if (!in) parse_fail(path, "truncated header");
    if (sdf.nx < 1 || sdf.ny < 1 || sdf.nz < 1 || !(sdf.resolution > 0.0))
        parse_fail(path, "bad dimensions or resolution");
    std::size_t count = static_cast<std::size_t>(sdf.nx) * sdf.ny * sdf.nz;
    sdf.values.resize(count);
    in.read(reinterpret_cast<char*>(sdf.values.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
        parse_fail(path, "truncated value data");
    return sdf;
}

} // namespace liqrec
