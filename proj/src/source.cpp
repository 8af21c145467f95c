#include "liqrec/source.hpp"

#include <cmath>
#include <stdexcept>

#include "liqrec/branching.hpp"

namespace liqrec {

InsertionRecord insert_source_particles(ParticleState& state, SourceState& src,
                                        const HyperParams& params) {
    InsertionRecord rec;
    long count = std::lround(src.f_hat);
    for (long n = 0; n < count; ++n) {
        if (state.size() >= params.particle_cap) {
            rec.cap_hit = true;
            break;
        }
        Vec3 spawn = src.s_hat + jitter_in_ball(0.05 * params.h, src.rng);
        rec.indices.push_back(state.size());
        rec.spawn_positions.push_back(spawn);
        // no velocity prediction for inserted particles
        state.append(spawn, Vec3{}, spawn);
    }
    return rec;
}

void update_source_location(SourceState& src, const std::vector<Vec3>& spawn_positions,
                            const std::vector<Vec3>& optimized_positions) {
    if (spawn_positions.size() != optimized_positions.size())
        throw std::invalid_argument("update_source_location: misaligned position lists");
    const double f_t = src.f_hat;
    if (!spawn_positions.empty() && f_t > 0.0) {
        Vec3 sum{};
        for (std::size_t i = 0; i < spawn_positions.size(); ++i)
            sum += optimized_positions[i] - spawn_positions[i];
        // adjustment shrinks as the emitted volume grows
        double alpha_s = src.cumulative_inserted > 0.0 ? 1.0 / src.cumulative_inserted : 1.0;
        src.s_hat += sum * (alpha_s / f_t);
    }
    src.cumulative_inserted += f_t;
}

void update_flow_rate(SourceState& src, double delta_n) {
    src.f_hat = std::max(0.0, src.alpha_f * delta_n + src.f_hat - src.lambda_f);
}

} // namespace liqrec
