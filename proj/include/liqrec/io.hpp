#pragma once

#include <string>
#include <vector>

#include "liqrec/camera.hpp"
#include "liqrec/image.hpp"
#include "liqrec/sdf.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

// All loaders throw std::runtime_error with a descriptive message on
// malformed input.

// Plain text: header "particles N", then one record per line
// "x y z vx vy vz px py pz".
void save_particles(const ParticleState& state, const std::string& path);
ParticleState load_particles(const std::string& path);

// 8-bit binary PGM ("P5"); values >= 128 load as 1
void save_mask(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask(const std::string& path);

// Structured text: "fx fy cx cy width height" then 12 row-major numbers of
// the world-to-camera transform [R | t].
void save_camera(const PinholeCamera& cam, const std::string& path);
PinholeCamera load_camera(const std::string& path);
void save_cameras(const std::vector<PinholeCamera>& cams, const std::string& path);
std::vector<PinholeCamera> load_cameras(const std::string& path);

// Binary: magic "VSDF1", u32le dims x3, f32 origin x3, f32 resolution, then
// nx*ny*nz f32 values in x-fastest order.
void save_sdf(const VoxelSDF& sdf, const std::string& path);
VoxelSDF load_sdf(const std::string& path);

} // namespace liqrec
