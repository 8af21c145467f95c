#include "liqrec/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "liqrec/kernels.hpp"

namespace liqrec {

ColorFieldContext make_color_field(const ParticleState& state, const HyperParams& params,
                                   double lambda_l) {
    ColorFieldContext ctx;
    ctx.h = params.h;
    DensityField field = compute_density(state, params);
    ctx.rho = field.rho;

    // Laplacian smoothing of the evaluation positions
    ctx.smoothed_positions.resize(state.size());
    for (std::size_t j = 0; j < state.size(); ++j) {
        Vec3 wsum = state.positions[j] * poly6(0.0, params.h);
        double w = poly6(0.0, params.h);
        for (int k : field.neighbor_lists[j]) {
            double wk = poly6((state.positions[j] - state.positions[k]).norm(), params.h);
            wsum += state.positions[k] * wk;
            w += wk;
        }
        ctx.smoothed_positions[j] =
            state.positions[j] * (1.0 - lambda_l) + (wsum / w) * lambda_l;
    }
    return ctx;
}

double color_field(const ColorFieldContext& ctx, const Vec3& query) {
    double c = 0.0;
    for (std::size_t j = 0; j < ctx.smoothed_positions.size(); ++j) {
        double r = (query - ctx.smoothed_positions[j]).norm();
        if (r >= ctx.h) continue;
        c += poly6(r, ctx.h) / ctx.rho[j];
    }
    return c;
}

Vec3 color_field_gradient(const ColorFieldContext& ctx, const Vec3& query) {
    Vec3 g{};
    for (std::size_t j = 0; j < ctx.smoothed_positions.size(); ++j) {
        Vec3 diff = query - ctx.smoothed_positions[j];
        double r = diff.norm();
        if (r >= ctx.h || r < 1e-12) continue;
        g += diff * (poly6_deriv(r, ctx.h) / (r * ctx.rho[j]));
    }
    return g;
}

SurfaceCloud surface_points(const ParticleState& state, const HyperParams& params,
                            double grid_spacing, double lambda_g) {
    SurfaceCloud cloud;
    if (state.size() == 0) return cloud;
    if (!(grid_spacing > 0.0))
        throw std::invalid_argument("surface_points: grid_spacing must be > 0");

    ColorFieldContext ctx = make_color_field(state, params);

    Vec3 lo = state.positions[0], hi = state.positions[0];
    for (const Vec3& p : state.positions) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    lo -= Vec3{params.h, params.h, params.h};
    hi += Vec3{params.h, params.h, params.h};

    for (double z = lo.z; z <= hi.z; z += grid_spacing) {
        for (double y = lo.y; y <= hi.y; y += grid_spacing) {
            for (double x = lo.x; x <= hi.x; x += grid_spacing) {
                Vec3 q{x, y, z};
                Vec3 g = color_field_gradient(ctx, q);
                double gn = g.norm();
                if (gn < lambda_g) continue;
                cloud.points.push_back(q);
                cloud.normals.push_back(g * (-1.0 / gn));
            }
        }
    }
    return cloud;
}

double interior_color_value(const HyperParams& params) {
    double R = 0.0;
    std::vector<Vec3> pts = calibration_lattice(params.resting_distance(), &R);
    ParticleState lattice;
    lattice.positions = pts;
    lattice.prev_positions = pts;
    lattice.velocities.assign(pts.size(), Vec3{});
    ColorFieldContext ctx = make_color_field(lattice, params);
    return color_field(ctx, Vec3{});
}

OccupancyGrid voxelize(const ParticleState& state, const HyperParams& params,
                       const GridSpec& grid, double threshold) {
    OccupancyGrid occ;
    occ.nx = grid.nx;
    occ.ny = grid.ny;
    occ.nz = grid.nz;
    occ.origin = grid.origin;
    occ.resolution = grid.resolution;
    occ.bits.assign(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz, 0);
    if (state.size() == 0) return occ;

    ColorFieldContext ctx = make_color_field(state, params);
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                Vec3 p = grid.origin + Vec3{static_cast<double>(i), static_cast<double>(j),
                                            static_cast<double>(k)} * grid.resolution;
                if (color_field(ctx, p) >= threshold) occ.bits[occ.index(i, j, k)] = 1;
            }
    return occ;
}

double iou_3d(const OccupancyGrid& a, const OccupancyGrid& b) {
    if (!a.same_spec(b)) throw std::invalid_argument("iou_3d: grid specs differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        inter += a.bits[i] & b.bits[i];
        uni += a.bits[i] | b.bits[i];
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

void save_surface_cloud(const SurfaceCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.points.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property float nx\nproperty float ny\nproperty float nz\n";
    out << "end_header\n";
    out.precision(9);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Vec3& p = cloud.points[i];
        const Vec3& n = cloud.normals[i];
        out << p.x << " " << p.y << " " << p.z << " " << n.x << " " << n.y << " " << n.z
            << "\n";
    }
}

} // namespace liqrec
