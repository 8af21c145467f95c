#include "liqrec/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace liqrec {

double VoxelSDF::sample(const Vec3& p) const {
    double lx = (p.x - origin.x) / resolution;
    double ly = (p.y - origin.y) / resolution;
    double lz = (p.z - origin.z) / resolution;
    lx = std::clamp(lx, 0.0, static_cast<double>(nx - 1));
    ly = std::clamp(ly, 0.0, static_cast<double>(ny - 1));
    lz = std::clamp(lz, 0.0, static_cast<double>(nz - 1));

    int i0 = std::min(static_cast<int>(lx), nx - 2 >= 0 ? nx - 2 : 0);
    int j0 = std::min(static_cast<int>(ly), ny - 2 >= 0 ? ny - 2 : 0);
    int k0 = std::min(static_cast<int>(lz), nz - 2 >= 0 ? nz - 2 : 0);
    if (nx == 1) i0 = 0;
    if (ny == 1) j0 = 0;
    if (nz == 1) k0 = 0;
    int i1 = std::min(i0 + 1, nx - 1);
    int j1 = std::min(j0 + 1, ny - 1);
    int k1 = std::min(k0 + 1, nz - 1);

    double fx = lx - i0, fy = ly - j0, fz = lz - k0;

    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    double c00 = lerp(at(i0, j0, k0), at(i1, j0, k0), fx);
    double c10 = lerp(at(i0, j1, k0), at(i1, j1, k0), fx);
    double c01 = lerp(at(i0, j0, k1), at(i1, j0, k1), fx);
    double c11 = lerp(at(i0, j1, k1), at(i1, j1, k1), fx);
    double c0 = lerp(c00, c10, fy);
    double c1 = lerp(c01, c11, fy);
    return lerp(c0, c1, fz);
}

Vec3 VoxelSDF::raw_gradient(const Vec3& p) const {
    double d = resolution;
    return {
        (sample({p.x + d, p.y, p.z}) - sample({p.x - d, p.y, p.z})) / (2.0 * d),
        (sample({p.x, p.y + d, p.z}) - sample({p.x, p.y - d, p.z})) / (2.0 * d),
        (sample({p.x, p.y, p.z + d}) - sample({p.x, p.y, p.z - d})) / (2.0 * d),
    };
}

double collision_constraint(const VoxelSDF& sdf, const Vec3& p) {
    return std::max(0.0, -sdf.sample(p));
}

CollisionResult solve_collision(const VoxelSDF& sdf, const ParticleState& state) {
    CollisionResult res;
    res.displacements.assign(state.size(), Vec3{});
    for (std::size_t i = 0; i < state.size(); ++i) {
        double depth = collision_constraint(sdf, state.positions[i]);
        if (depth <= 0.0) continue;
        Vec3 g = sdf.raw_gradient(state.positions[i]);
        double gn = g.norm();
        if (gn < 1e-9) {
            ++res.degenerate_gradients;
            continue;
        }
        res.displacements[i] = g * (depth / gn);
    }
    return res;
}

double ScenePrimitive::evaluate(const Vec3& p) const {
    double d = 0.0;
    switch (shape) {
        case Shape::HalfSpace:
            d = (p - point).dot(normal.normalized());
            break;
        case Shape::Box: {
            Vec3 c = (box_min + box_max) * 0.5;
            Vec3 b = (box_max - box_min) * 0.5;
            Vec3 q{std::abs(p.x - c.x) - b.x, std::abs(p.y - c.y) - b.y,
                   std::abs(p.z - c.z) - b.z};
            Vec3 qpos{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
            d = qpos.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
            break;
        }
        case Shape::Cylinder: {
            double dr = std::hypot(p.x - point.x, p.y - point.y) - cyl_radius;
            double dz = std::max(cyl_zmin - p.z, p.z - cyl_zmax);
            Vec3 q{std::max(dr, 0.0), std::max(dz, 0.0), 0.0};
            d = q.norm() + std::min(std::max(dr, dz), 0.0);
            break;
        }
    }
    // primitives above are SDFs of the solid (negative inside); the scene
    // convention is positive in free space, so the solid SDF is used directly
    return negate ? -d : d;
}

VoxelSDF build_sdf_from_scene(const std::vector<ScenePrimitive>& scene, const GridSpec& grid) {
    if (scene.empty()) throw std::invalid_argument("build_sdf_from_scene: empty scene");
    if (grid.nx < 1 || grid.ny < 1 || grid.nz < 1 || !(grid.resolution > 0.0))
        throw std::invalid_argument("build_sdf_from_scene: bad grid spec");

    VoxelSDF sdf;
    sdf.nx = grid.nx;
    sdf.ny = grid.ny;
    sdf.nz = grid.nz;
    sdf.origin = grid.origin;
    sdf.resolution = grid.resolution;
    sdf.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);

    for (int k = 0; k < grid.nz; ++k) {
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                Vec3 p = grid.origin + Vec3{static_cast<double>(i), static_cast<double>(j),
                                            static_cast<double>(k)} * grid.resolution;
                double v = scene.front().evaluate(p);
                for (std::size_t s = 1; s < scene.size(); ++s) {
                    double e = scene[s].evaluate(p);
                    v = scene[s].combine == ScenePrimitive::Combine::Union ? std::min(v, e)
                                                                          : std::max(v, e);
                }
                sdf.at(i, j, k) = static_cast<float>(v);
            }
        }
    }
    return sdf;
}

} // namespace liqrec
