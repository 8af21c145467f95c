#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liqrec/types.hpp"
#include "liqrec/vec3.hpp"

namespace liqrec {

// Dense signed-distance grid. Sample points sit at origin + index * resolution;
// values are positive in free space, negative inside solids. Sampling outside
// the grid clamps to the border.
struct VoxelSDF {
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin;
    double resolution = 0.0;
    std::vector<float> values; // x-fastest

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(k) * ny * nx + static_cast<std::size_t>(j) * nx + i;
    }
    float at(int i, int j, int k) const { return values[index(i, j, k)]; }
    float& at(int i, int j, int k) { return values[index(i, j, k)]; }

    double sample(const Vec3& p) const;

    // central-difference gradient with step d = resolution, not normalized
    Vec3 raw_gradient(const Vec3& p) const;
};

// relu(-SDF(p)): penetration depth, zero when the particle is in free space
double collision_constraint(const VoxelSDF& sdf, const Vec3& p);

struct CollisionResult {
    std::vector<Vec3> displacements;
    int degenerate_gradients = 0; // particles in collision with a vanishing gradient
};

// One projection pass: each penetrating particle is moved by its penetration
// depth along the normalized SDF gradient.
CollisionResult solve_collision(const VoxelSDF& sdf, const ParticleState& state);

// CSG scene description for building analytic SDF grids.
struct ScenePrimitive {
    enum class Shape { HalfSpace, Box, Cylinder };
    enum class Combine { Union, Intersect };

    Shape shape = Shape::HalfSpace;
    Combine combine = Combine::Union;
    bool negate = false;

    // HalfSpace: solid where dot(p - point, normal) <= 0
    Vec3 point;
    Vec3 normal{0, 0, 1};
    // Box: solid axis-aligned box
    Vec3 box_min, box_max;
    // Cylinder: solid vertical cylinder, axis +z through `point`
    double cyl_radius = 0.0;
    double cyl_zmin = 0.0, cyl_zmax = 0.0;

    double evaluate(const Vec3& p) const;
};

struct GridSpec {
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin;
    double resolution = 0.0;
};

// Fold the primitive list left to right: union = min, intersection = max,
// negate flips the primitive's sign first. Throws on an empty scene.
VoxelSDF build_sdf_from_scene(const std::vector<ScenePrimitive>& scene, const GridSpec& grid);

} // namespace liqrec
