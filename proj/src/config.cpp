#include "liqrec/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liqrec {

namespace {

[[noreturn]] void config_fail(const std::string& path, int line, const std::string& why) {
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + why);
}

// applies a "key value..." line to params; returns false if the key is unknown
bool apply_param(HyperParams& p, const std::string& key, std::istringstream& rest) {
    auto num = [&](double& out) {
        if (!(rest >> out)) throw std::runtime_error("expected a number after '" + key + "'");
    };
    if (key == "h") num(p.h);
    else if (key == "resting_distance_factor") num(p.resting_distance_factor);
    else if (key == "rho0") num(p.rho0);
    else if (key == "eps_rho") num(p.eps_rho);
    else if (key == "eps_s") num(p.eps_s);
    else if (key == "gamma_s") num(p.gamma_s);
    else if (key == "gamma_I") num(p.gamma_I);
    else if (key == "lambda_d") num(p.lambda_d);
    else if (key == "lambda_v") num(p.lambda_v);
    else if (key == "lambda_s") num(p.lambda_s);
    else if (key == "lambda_p_factor") num(p.lambda_p_factor);
    else if (key == "lambda_n") num(p.lambda_n);
    else if (key == "alpha_I") num(p.alpha_I);
    else if (key == "dt") num(p.dt);
    else if (key == "sphere_radius") num(p.sphere_radius);
    else if (key == "softness_k") num(p.softness_k);
    else if (key == "binarize_tau") num(p.binarize_tau);
    else if (key == "n_o") { double v; num(v); p.n_o = static_cast<int>(v); }
    else if (key == "n_j") { double v; num(v); p.n_j = static_cast<int>(v); }
    else if (key == "n_c") { double v; num(v); p.n_c = static_cast<int>(v); }
    else if (key == "n_i") { double v; num(v); p.n_i = static_cast<int>(v); }
    else if (key == "gravity") {
        if (!(rest >> p.g.x >> p.g.y >> p.g.z))
            throw std::runtime_error("gravity needs three components");
    }
    else if (key == "particle_cap") { double v; num(v); p.particle_cap = static_cast<std::size_t>(v); }
    else if (key == "rng_seed") { double v; num(v); p.rng_seed = static_cast<unsigned long long>(v); }
    else return false;
    return true;
}

PinholeCamera parse_camera(std::istringstream& rest) {
    PinholeCamera cam;
    if (!(rest >> cam.fx >> cam.fy >> cam.cx >> cam.cy >> cam.width >> cam.height))
        throw std::runtime_error("camera needs 'fx fy cx cy width height' plus 12 pose numbers");
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c)
            if (!(rest >> cam.rotation.m[3 * r + c]))
                throw std::runtime_error("camera pose truncated");
        if (!(rest >> cam.translation[static_cast<std::size_t>(r)]))
            throw std::runtime_error("camera pose truncated");
    }
    cam.validate();
    return cam;
}

ScenePrimitive parse_primitive(std::istringstream& rest) {
    std::string shape;
    if (!(rest >> shape)) throw std::runtime_error("primitive needs a shape");
    ScenePrimitive prim;
    if (shape == "halfspace") {
        prim.shape = ScenePrimitive::Shape::HalfSpace;
        if (!(rest >> prim.point.x >> prim.point.y >> prim.point.z >> prim.normal.x >>
              prim.normal.y >> prim.normal.z))
            throw std::runtime_error("halfspace needs 'px py pz nx ny nz'");
    } else if (shape == "box") {
        prim.shape = ScenePrimitive::Shape::Box;
        if (!(rest >> prim.box_min.x >> prim.box_min.y >> prim.box_min.z >> prim.box_max.x >>
              prim.box_max.y >> prim.box_max.z))
            throw std::runtime_error("box needs 'minx miny minz maxx maxy maxz'");
    } else if (shape == "cylinder") {
        prim.shape = ScenePrimitive::Shape::Cylinder;
        if (!(rest >> prim.point.x >> prim.point.y >> prim.cyl_radius >> prim.cyl_zmin >>
              prim.cyl_zmax))
            throw std::runtime_error("cylinder needs 'cx cy radius zmin zmax'");
    } else {
        throw std::runtime_error("unknown primitive shape '" + shape + "'");
    }
    std::string flag;
    while (rest >> flag) {
        if (flag == "union") prim.combine = ScenePrimitive::Combine::Union;
        else if (flag == "intersect") prim.combine = ScenePrimitive::Combine::Intersect;
        else if (flag == "negate") prim.negate = true;
        else throw std::runtime_error("unknown primitive flag '" + flag + "'");
    }
    return prim;
}

template <typename Handler>
void parse_lines(const std::string& path, Handler&& handler) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        try {
            handler(key, ss);
        } catch (const std::exception& e) {
            config_fail(path, lineno, e.what());
        }
    }
}

} // namespace

void RunConfig::validate() const {
    namespace fs = std::filesystem;
    params.validate();
    if (masks_dir.empty() || !fs::is_directory(masks_dir))
        throw std::invalid_argument("config: masks_dir missing or not a directory: " + masks_dir);
    if (cameras_file.empty() || !fs::is_regular_file(cameras_file))
        throw std::invalid_argument("config: cameras file not found: " + cameras_file);
    if (sdf_file.empty() || !fs::is_regular_file(sdf_file))
        throw std::invalid_argument("config: sdf file not found: " + sdf_file);
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir not set");
    if (frames < 1) throw std::invalid_argument("config: frames must be >= 1");
}

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    parse_lines(path, [&](const std::string& key, std::istringstream& rest) {
        if (key == "masks_dir") rest >> cfg.masks_dir;
        else if (key == "cameras") rest >> cfg.cameras_file;
        else if (key == "sdf") rest >> cfg.sdf_file;
        else if (key == "out_dir") rest >> cfg.out_dir;
        else if (key == "frames") rest >> cfg.frames;
        else if (key == "source") {
            std::string v;
            rest >> v;
            cfg.source_enabled = (v == "on" || v == "true" || v == "1");
        }
        else if (key == "source_rate") rest >> cfg.source_initial_rate;
        else if (key == "seed_point") {
            Vec3 p;
            if (!(rest >> p.x >> p.y >> p.z))
                throw std::runtime_error("seed_point needs three components");
            cfg.manual_seed = p;
        }
        else if (!apply_param(cfg.params, key, rest))
            throw std::runtime_error("unknown config key '" + key + "'");
    });
    return cfg;
}

ScenarioSpec load_scenario(const std::string& path) {
    ScenarioSpec spec;
    parse_lines(path, [&](const std::string& key, std::istringstream& rest) {
        if (key == "frames") rest >> spec.frames;
        else if (key == "grid") {
            if (!(rest >> spec.grid.nx >> spec.grid.ny >> spec.grid.nz >> spec.grid.origin.x >>
                  spec.grid.origin.y >> spec.grid.origin.z >> spec.grid.resolution))
                throw std::runtime_error("grid needs 'nx ny nz ox oy oz resolution'");
        }
        else if (key == "camera") spec.cameras.push_back(parse_camera(rest));
        else if (key == "primitive") spec.scene.push_back(parse_primitive(rest));
        else if (key == "emitter") {
            if (!(rest >> spec.emitter.x >> spec.emitter.y >> spec.emitter.z >>
                  spec.emit_rate >> spec.emit_frames))
                throw std::runtime_error("emitter needs 'x y z rate frames'");
        }
        else if (key == "blob") {
            Vec3 lo, hi;
            if (!(rest >> lo.x >> lo.y >> lo.z >> hi.x >> hi.y >> hi.z))
                throw std::runtime_error("blob needs six numbers");
            spec.blob_min = lo;
            spec.blob_max = hi;
        }
        else if (!apply_param(spec.params, key, rest))
            throw std::runtime_error("unknown scenario key '" + key + "'");
    });
    return spec;
}

std::string mask_filename(int frame, int camera) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%06d_cam%d.pgm", frame, camera);
    return buf;
}

std::string particles_filename(int frame) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "particles_%06d.txt", frame);
    return buf;
}

} // namespace liqrec
