#pragma once

#include <vector>

#include "liqrec/density.hpp"
#include "liqrec/sdf.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

struct SurfaceCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
};

struct OccupancyGrid {
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin;
    double resolution = 0.0;
    std::vector<std::uint8_t> bits;

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(k) * ny * nx + static_cast<std::size_t>(j) * nx + i;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }
    bool same_spec(const OccupancyGrid& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && resolution == o.resolution &&
               (origin - o.origin).norm() < 1e-12;
    }
};

// SPH color field context: Laplacian-smoothed positions and per-particle
// densities evaluated at the original positions.
struct ColorFieldContext {
    std::vector<Vec3> smoothed_positions;
    std::vector<double> rho;
    double h = 0.0;
};

ColorFieldContext make_color_field(const ParticleState& state, const HyperParams& params,
                                   double lambda_l = 0.2);

double color_field(const ColorFieldContext& ctx, const Vec3& query);
Vec3 color_field_gradient(const ColorFieldContext& ctx, const Vec3& query);

// Dense grid scan over the particle bounding box (+h): keep points where the
// color-field gradient magnitude reaches lambda_g, normal = -grad/|grad|.
SurfaceCloud surface_points(const ParticleState& state, const HyperParams& params,
                            double grid_spacing, double lambda_g = 0.5);

// Reference interior color-field value, from the resting-density calibration
// lattice; the default occupancy threshold is half of it.
double interior_color_value(const HyperParams& params);

OccupancyGrid voxelize(const ParticleState& state, const HyperParams& params,
                       const GridSpec& grid, double threshold);

double iou_3d(const OccupancyGrid& a, const OccupancyGrid& b);

// ASCII PLY with per-vertex normals
void save_surface_cloud(const SurfaceCloud& cloud, const std::string& path);

} // namespace liqrec
