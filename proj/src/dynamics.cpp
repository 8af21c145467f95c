#include "liqrec/dynamics.hpp"

#include <stdexcept>

#include "liqrec/kernels.hpp"

namespace liqrec {

void induce_velocity(ParticleState& state, const HyperParams& params) {
    if (!(params.dt > 0.0)) throw std::invalid_argument("induce_velocity: dt must be > 0");
    const double scale = (1.0 - params.lambda_d) / params.dt;
    for (std::size_t i = 0; i < state.size(); ++i)
        state.velocities[i] = (state.positions[i] - state.prev_positions[i]) * scale;
}

void apply_xsph(ParticleState& state, const DensityField& field, const HyperParams& params) {
    if (params.lambda_v == 0.0) return;
    std::vector<Vec3> smoothed = state.velocities;
    for (std::size_t i = 0; i < state.size(); ++i) {
        Vec3 acc{};
        for (int j : field.neighbor_lists[i]) {
            double w = poly6((state.positions[i] - state.positions[j]).norm(), params.h);
            acc += (state.velocities[j] - state.velocities[i]) * (w / field.rho[j]);
        }
        smoothed[i] += acc * params.lambda_v;
    }
    state.velocities = std::move(smoothed);
}

void predict(ParticleState& state, const HyperParams& params) {
    const Vec3 gravity_step = params.g * (0.5 * params.dt * params.dt);
    for (std::size_t i = 0; i < state.size(); ++i) {
        state.prev_positions[i] = state.positions[i];
        state.positions[i] += state.velocities[i] * params.dt + gravity_step;
    }
}

} // namespace liqrec
