#pragma once

#include <stdexcept>

#include "liqrec/vec3.hpp"

namespace liqrec {

// Ideal pinhole camera. world_to_camera maps world points into the camera
// frame (z forward, x right, y down in image coordinates).
struct PinholeCamera {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
    Mat3 rotation;      // world -> camera
    Vec3 translation;   // world -> camera

    Vec3 to_camera(const Vec3& p) const { return rotation * p + translation; }

    Vec3 center() const { return rotation.transposed() * (-translation); }

    // throws std::invalid_argument on bad intrinsics or a non-rigid rotation
    void validate() const;
};

inline void PinholeCamera::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw std::invalid_argument("camera: focal lengths must be > 0");
    if (width < 1 || height < 1)
        throw std::invalid_argument("camera: image size must be >= 1");
    const Mat3& R = rotation;
    const Mat3 Rt = R.transposed();
    // R^T R == I and det == +1
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double v = Rt.row(r).dot(Vec3{R.m[c], R.m[3 + c], R.m[6 + c]});
            double want = (r == c) ? 1.0 : 0.0;
            if (std::abs(v - want) > 1e-6)
                throw std::invalid_argument("camera: rotation not orthonormal");
        }
    }
    double det = R.row(0).dot(R.row(1).cross(R.row(2)));
    if (std::abs(det - 1.0) > 1e-6)
        throw std::invalid_argument("camera: rotation determinant must be +1");
}

} // namespace liqrec
