#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "liqrec/vec3.hpp"

namespace liqrec {

// numeric failure (non-finite state, diverged solve) as opposed to bad input
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Particle set for one time step: current positions p_t, the optimized
// positions of the previous step (used for induced velocity), and velocities.
struct ParticleState {
    std::vector<Vec3> positions;
    std::vector<Vec3> prev_positions;
    std::vector<Vec3> velocities;

    std::size_t size() const { return positions.size(); }

    bool consistent() const {
        return positions.size() == prev_positions.size() &&
               positions.size() == velocities.size();
    }

    bool finite() const {
        for (const auto& p : positions) if (!p.finite()) return false;
        for (const auto& p : prev_positions) if (!p.finite()) return false;
        for (const auto& v : velocities) if (!v.finite()) return false;
        return true;
    }

    void append(const Vec3& pos, const Vec3& vel, const Vec3& prev) {
        positions.push_back(pos);
        velocities.push_back(vel);
        prev_positions.push_back(prev);
    }

    void remove(std::size_t i) {
        positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(i));
        prev_positions.erase(prev_positions.begin() + static_cast<std::ptrdiff_t>(i));
        velocities.erase(velocities.begin() + static_cast<std::ptrdiff_t>(i));
    }
};

struct HyperParams {
    double h = 0.04;                       // interaction radius [m]
    double resting_distance_factor = 0.6;  // resting distance = factor * h
    double rho0 = 0.0;                     // resting density; 0 = calibrate on demand
    double eps_rho = 100.0;                // Gauss-Newton damping
    double eps_s = 1e-2;                   // SMAPE stabilizer
    double gamma_s = 1e-3;                 // mean gradient threshold
    double gamma_I = 0.9;                  // IoU threshold
    double lambda_d = 0.2;                 // velocity damping
    double lambda_v = 0.75;                // XSPH viscosity
    double lambda_s = 0.1;                 // artificial pressure strength
    double lambda_p_factor = 0.2;          // lambda_p = factor * h
    double lambda_n = 4.0;                 // artificial pressure exponent
    double alpha_I = 0.02;                 // image gradient step
    int n_o = 30;
    int n_j = 2;
    int n_c = 5;
    int n_i = 5;
    Vec3 g{0.0, 0.0, -9.81};
    double dt = 1.0 / 24.0;
    double sphere_radius = 0.0;            // 0 = default 0.3 * h
    double softness_k = 1.0;               // px^-1
    double binarize_tau = 0.5;
    std::size_t particle_cap = 10000;
    unsigned long long rng_seed = 1;

    double resting_distance() const { return resting_distance_factor * h; }
    double lambda_p() const { return lambda_p_factor * h; }
    double render_radius() const { return sphere_radius > 0.0 ? sphere_radius : 0.3 * h; }

    // throws std::invalid_argument naming the offending field
    void validate() const;
};

inline void HyperParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("HyperParams: " + msg); };
    if (!(h > 0.0)) fail("h must be > 0");
    if (!(dt > 0.0)) fail("dt must be > 0");
    if (!(resting_distance_factor > 0.0 && resting_distance_factor < 1.0))
        fail("resting_distance_factor must be in (0,1)");
    if (rho0 < 0.0) fail("rho0 must be >= 0");
    if (!(eps_rho >= 0.0)) fail("eps_rho must be >= 0");
    if (!(eps_s > 0.0)) fail("eps_s must be > 0");
    if (!(gamma_s >= 0.0)) fail("gamma_s must be >= 0");
    if (!(gamma_I >= 0.0 && gamma_I <= 1.0)) fail("gamma_I must be in [0,1]");
    if (!(lambda_d >= 0.0 && lambda_d <= 1.0)) fail("lambda_d must be in [0,1]");
    if (!(lambda_v >= 0.0)) fail("lambda_v must be >= 0");
    if (!(lambda_s >= 0.0)) fail("lambda_s must be >= 0");
    if (!(lambda_p_factor > 0.0)) fail("lambda_p_factor must be > 0");
    if (!(alpha_I > 0.0)) fail("alpha_I must be > 0");
    if (n_o < 1) fail("n_o must be >= 1");
    if (n_j < 1) fail("n_j must be >= 1");
    if (n_c < 1) fail("n_c must be >= 1");
    if (n_i < 1) fail("n_i must be >= 1");
    if (!(softness_k > 0.0)) fail("softness_k must be > 0");
    if (!(binarize_tau > 0.0 && binarize_tau < 1.0)) fail("binarize_tau must be in (0,1)");
    if (sphere_radius < 0.0) fail("sphere_radius must be >= 0");
    if (particle_cap < 4) fail("particle_cap must be >= 4");
    if (!g.finite()) fail("g must be finite");
}

} // namespace liqrec
