#pragma once

#include "liqrec/density.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

// v_i = (1 - lambda_d)(p_t - p_{t-1}) / dt
void induce_velocity(ParticleState& state, const HyperParams& params);

// XSPH: v_i += lambda_v sum_j (v_j - v_i) / rho_j * W(|p_i - p_j|, h)
void apply_xsph(ParticleState& state, const DensityField& field, const HyperParams& params);

// p <- p + v dt + 1/2 g dt^2, prev_positions <- old positions
void predict(ParticleState& state, const HyperParams& params);

} // namespace liqrec
