#include "liqrec/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "liqrec/kernels.hpp"

namespace liqrec {

namespace {

std::int64_t cell_key(int cx, int cy, int cz) {
    // pack 21-bit signed coords
    auto u = [](int c) { return static_cast<std::int64_t>(c & 0x1FFFFF); };
    return (u(cx) << 42) | (u(cy) << 21) | u(cz);
}

} // namespace

NeighborGrid::NeighborGrid(const std::vector<Vec3>& positions, double h) {
    const int n = static_cast<int>(positions.size());
    lists_.assign(positions.size(), {});
    std::unordered_map<std::int64_t, std::vector<int>> cells;
    cells.reserve(positions.size());
    auto cell_of = [&](const Vec3& p) {
        return std::array<int, 3>{static_cast<int>(std::floor(p.x / h)),
                                  static_cast<int>(std::floor(p.y / h)),
                                  static_cast<int>(std::floor(p.z / h))};
    };
    for (int i = 0; i < n; ++i) {
        auto c = cell_of(positions[i]);
        cells[cell_key(c[0], c[1], c[2])].push_back(i);
    }
    const double h2 = h * h;
    for (int i = 0; i < n; ++i) {
        auto c = cell_of(positions[i]);
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    auto it = cells.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
                    if (it == cells.end()) continue;
                    for (int j : it->second) {
                        if (j == i) continue;
                        if ((positions[i] - positions[j]).norm2() < h2)
                            lists_[i].push_back(j);
                    }
                }
        std::sort(lists_[i].begin(), lists_[i].end());
    }
}

DensityField compute_density(const ParticleState& state, const HyperParams& params) {
    const double h = params.h;
    NeighborGrid grid(state.positions, h);
    DensityField field;
    field.rho.resize(state.size());
    field.neighbor_lists.resize(state.size());
    const double self = poly6(0.0, h);
    for (std::size_t i = 0; i < state.size(); ++i) {
        double rho = self;
        for (int j : grid.neighbors(static_cast<int>(i)))
            rho += poly6((state.positions[i] - state.positions[j]).norm(), h);
        field.rho[i] = rho;
        field.neighbor_lists[i] = grid.neighbors(static_cast<int>(i));
    }
    return field;
}

std::vector<double> density_constraint(const DensityField& field, const HyperParams& params) {
    if (!(params.rho0 > 0.0))
        throw std::invalid_argument("density_constraint: rho0 must be > 0");
    std::vector<double> c(field.rho.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = field.rho[i] / params.rho0 - 1.0;
    return c;
}

std::vector<double> ConstraintJacobian::apply(const std::vector<Vec3>& x) const {
    std::vector<double> y(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double v = rows[i].diag.dot(x[i]);
        for (const auto& [j, g] : rows[i].off) v += g.dot(x[j]);
        y[i] = v;
    }
    return y;
}

std::vector<Vec3> ConstraintJacobian::apply_transposed(const std::vector<double>& lambda) const {
    std::vector<Vec3> x(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        x[i] += rows[i].diag * lambda[i];
        for (const auto& [j, g] : rows[i].off) x[j] += g * lambda[i];
    }
    return x;
}

ConstraintJacobian constraint_jacobian(const ParticleState& state, const DensityField& field,
                                       const HyperParams& params) {
    const double h = params.h;
    const double rmin = 1e-7 * h;
    ConstraintJacobian jac;
    jac.rows.resize(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        JacobianRow& row = jac.rows[i];
        for (int j : field.neighbor_lists[i]) {
            Vec3 diff = state.positions[i] - state.positions[static_cast<std::size_t>(j)];
            double r = diff.norm();
            if (r < rmin) continue;
            Vec3 u = diff / r;
            double w = spiky_grad_magnitude(r, h) / params.rho0;
            row.diag += u * w;
            row.off.emplace_back(j, u * (-w));
        }
    }
    return jac;
}

DensityStep solve_density(const ParticleState& state, const HyperParams& params) {
    const std::size_t n = state.size();
    DensityStep step;
    step.displacements.assign(n, Vec3{});
    if (n == 0) return step;

    DensityField field = compute_density(state, params);
    std::vector<double> c = density_constraint(field, params);
    ConstraintJacobian jac = constraint_jacobian(state, field, params);

    // CG on (J J^T + eps I) lambda = C
    auto matvec = [&](const std::vector<double>& v) {
        std::vector<double> out = jac.apply(jac.apply_transposed(v));
        for (std::size_t i = 0; i < n; ++i) out[i] += params.eps_rho * v[i];
        return out;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    std::vector<double> lambda(n, 0.0);
    std::vector<double> r = c; // residual with lambda = 0
    std::vector<double> p = r;
    double rr = dot(r, r);
    const double tol2 = 1e-12 * std::max(rr, 1e-300);
    const int max_iter = 50;
    int it = 0;
    for (; it < max_iter && rr > tol2; ++it) {
        std::vector<double> ap = matvec(p);
        double alpha = rr / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            lambda[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    step.cg_iterations = it;
    if (rr > tol2) {
        step.cg_converged = false;
        // Jacobi fallback: lambda_i = C_i / A_ii
        for (std::size_t i = 0; i < n; ++i) {
            double aii = jac.rows[i].diag.norm2() + params.eps_rho;
            for (const auto& [j, g] : jac.rows[i].off) aii += g.norm2();
            lambda[i] = c[i] / aii;
        }
    }

    std::vector<Vec3> delta = jac.apply_transposed(lambda);
    for (std::size_t i = 0; i < n; ++i) step.displacements[i] = -delta[i];

    // artificial pressure term (short-range anti-clustering correction)
    const double h = params.h;
    const double w_ref = poly6(params.lambda_p(), h);
    const double rmin = 1e-7 * h;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 s_corr{};
        for (int j : field.neighbor_lists[i]) {
            Vec3 diff = state.positions[i] - state.positions[static_cast<std::size_t>(j)];
            double rij = diff.norm();
            if (rij < rmin) continue;
            double ratio = poly6(rij, h) / w_ref;
            Vec3 pair_grad = (diff / rij) * (spiky_grad_magnitude(rij, h) / params.rho0);
            s_corr -= (params.lambda_s / params.rho0) * std::pow(ratio, params.lambda_n) * pair_grad;
        }
        step.displacements[i] += s_corr;
    }
    return step;
}

std::vector<Vec3> calibration_lattice(double resting_distance, double* radius_out) {
    const double d = resting_distance;
    // sphere radius holding ~1000 particles at HCP packing (d^3/sqrt(2) per particle)
    const double vol = 1000.0 * d * d * d / std::sqrt(2.0);
    const double R = std::cbrt(3.0 * vol / (4.0 * std::numbers::pi));

    std::vector<Vec3> pts;
    const double ax = d;
    const double ay = d * std::sqrt(3.0) / 2.0;
    const double az = d * std::sqrt(2.0 / 3.0); // HCP layer spacing
    const int ni = static_cast<int>(std::ceil(R / ax)) + 2;
    const int nj = static_cast<int>(std::ceil(R / ay)) + 2;
    const int nk = static_cast<int>(std::ceil(R / az)) + 2;
    for (int k = -nk; k <= nk; ++k) {
        for (int j = -nj; j <= nj; ++j) {
            for (int i = -ni; i <= ni; ++i) {
                double x = (i + 0.5 * std::abs((j + k) % 2)) * ax;
                double y = (j + ((k % 2 + 2) % 2) / 3.0) * ay;
                double z = k * az;
                Vec3 p{x, y, z};
                if (p.norm() <= R) pts.push_back(p);
            }
        }
    }
    if (radius_out) *radius_out = R;
    return pts;
}

double compute_resting_density(double resting_distance, double h) {
    if (!(resting_distance > 0.0) || !(resting_distance < h))
        throw std::invalid_argument("compute_resting_density: need 0 < resting_distance < h");

    double R = 0.0;
    std::vector<Vec3> pts = calibration_lattice(resting_distance, &R);

    ParticleState state;
    state.positions = pts;
    state.prev_positions = pts;
    state.velocities.assign(pts.size(), Vec3{});
    HyperParams hp;
    hp.h = h;
    DensityField field = compute_density(state, hp);

    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].norm() <= R - h) {
            sum += field.rho[i];
            ++count;
        }
    }
    if (count < 10)
        throw std::invalid_argument(
            "compute_resting_density: fewer than 10 interior particles; h too large "
            "relative to packing");
    return sum / count;
}

HyperParams with_resting_density(HyperParams params) {
    if (!(params.rho0 > 0.0))
        params.rho0 = compute_resting_density(params.resting_distance(), params.h);
    return params;
}

} // namespace liqrec
