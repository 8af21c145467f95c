#pragma once

#include <random>
#include <vector>

#include "liqrec/types.hpp"
#include "liqrec/vec3.hpp"

namespace liqrec {

// Single static emitter estimate: location s_hat and flow rate f_hat
// (particles per frame), refined from optimization feedback.
struct SourceState {
    Vec3 s_hat;
    double f_hat = 1.0;
    double cumulative_inserted = 0.0; // sum of f_hat over past frames
    double alpha_f = 0.1;
    double lambda_f = 0.05; // alpha_f / 2
    std::mt19937_64 rng{0x5eedULL};
};

struct InsertionRecord {
    std::vector<std::size_t> indices;    // indices in the grown state
    std::vector<Vec3> spawn_positions;   // pre-optimization locations
    bool cap_hit = false;
};

// Appends round(f_hat) particles at s_hat with a small jitter, zero velocity,
// prev = spawn. Caps at params.particle_cap.
InsertionRecord insert_source_particles(ParticleState& state, SourceState& src,
                                        const HyperParams& params);

// s_hat += (alpha_s / f_t) * sum(post - pre), alpha_s = 1 / cumulative prior
// insertions; no-op when nothing was inserted or nothing preceded this frame.
void update_source_location(SourceState& src, const std::vector<Vec3>& spawn_positions,
                            const std::vector<Vec3>& optimized_positions);

// f_t = alpha_f * delta_N + f_{t-1} - lambda_f, clamped at 0
void update_flow_rate(SourceState& src, double delta_n);

} // namespace liqrec
