#pragma once

#include <cstdint>
#include <vector>

#include "liqrec/types.hpp"
#include "liqrec/vec3.hpp"

namespace liqrec {

// Uniform hash grid with cell size h. Rebuilt per constraint iteration.
class NeighborGrid {
public:
    NeighborGrid(const std::vector<Vec3>& positions, double h);

    // indices j != i with |p_i - p_j| < h
    const std::vector<int>& neighbors(int i) const { return lists_[i]; }
    std::size_t size() const { return lists_.size(); }

private:
    std::vector<std::vector<int>> lists_;
};

struct DensityField {
    std::vector<double> rho;
    std::vector<std::vector<int>> neighbor_lists;
};

DensityField compute_density(const ParticleState& state, const HyperParams& params);

// C_i = rho_i / rho0 - 1
std::vector<double> density_constraint(const DensityField& field, const HyperParams& params);

// Row i of the N x 3N constraint Jacobian, stored sparsely per pair.
// diag = dC_i/dp_i; off[k] pairs a neighbor index with dC_i/dp_j.
struct JacobianRow {
    Vec3 diag;
    std::vector<std::pair<int, Vec3>> off;
};

struct ConstraintJacobian {
    std::vector<JacobianRow> rows;

    // y = J x, x has 3N components laid out as N Vec3
    std::vector<double> apply(const std::vector<Vec3>& x) const;
    // x = J^T lambda
    std::vector<Vec3> apply_transposed(const std::vector<double>& lambda) const;
};

ConstraintJacobian constraint_jacobian(const ParticleState& state, const DensityField& field,
                                       const HyperParams& params);

struct DensityStep {
    std::vector<Vec3> displacements; // Gauss-Newton step + s_corr
    bool cg_converged = true;
    int cg_iterations = 0;
};

// Regularized Gauss-Newton projection: solve (J J^T + eps_rho I) lambda = C by
// conjugate gradient, displacement = -J^T lambda, then add the artificial
// pressure correction. Falls back to a Jacobi step if CG stalls.
DensityStep solve_density(const ParticleState& state, const HyperParams& params);

// ~1000-point hexagonal close packing with the given nearest-neighbor spacing,
// clipped to its smallest enclosing sphere (radius written to *radius_out).
std::vector<Vec3> calibration_lattice(double resting_distance, double* radius_out);

// Resting density from the configured resting distance: densities of interior
// particles of a ~1000-particle hexagonal close packing clipped to a sphere.
double compute_resting_density(double resting_distance, double h);

// ensures params.rho0 is set, calibrating it if left at zero
HyperParams with_resting_density(HyperParams params);

} // namespace liqrec
