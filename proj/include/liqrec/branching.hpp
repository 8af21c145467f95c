#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "liqrec/density.hpp"
#include "liqrec/renderer.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

enum class BranchAction { None, Duplicate, Remove };

struct BranchDecision {
    BranchAction action = BranchAction::None;
    std::size_t particle_index = 0;
    std::vector<double> loss_table; // l1 constraint loss per candidate
    bool floor_refused = false;     // remove requested at or below the seed floor
};

// particle count never drops below the four seed particles
constexpr std::size_t kMinParticles = 4;

bool detect_local_minimum(const LossReport& report, const HyperParams& params);

BranchAction choose_action(std::size_t observed_area, std::size_t rendered_area);

// Density constraints after cloning particle i in place (all N entries plus
// the clone's own value, which equals the parent's updated one).
std::vector<double> incremental_constraints_add(const ParticleState& state,
                                                const DensityField& field,
                                                const std::vector<double>& base,
                                                const HyperParams& params, std::size_t i);

// Density constraints of the survivors after removing particle i.
std::vector<double> incremental_constraints_remove(const ParticleState& state,
                                                   const DensityField& field,
                                                   const std::vector<double>& base,
                                                   const HyperParams& params, std::size_t i);

BranchDecision select_particle(const ParticleState& state, const HyperParams& params,
                               BranchAction action);

// Duplicates append a jittered clone with zero velocity and prev = spawn.
void apply_decision(ParticleState& state, const BranchDecision& decision,
                    const HyperParams& params, std::mt19937_64& rng);

Vec3 jitter_in_ball(double radius, std::mt19937_64& rng);

} // namespace liqrec
