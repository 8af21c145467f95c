#include "liqrec/branching.hpp"

#include <cmath>
#include <limits>

#include "liqrec/kernels.hpp"

namespace liqrec {

bool detect_local_minimum(const LossReport& report, const HyperParams& params) {
    return report.mean_grad_norm <= params.gamma_s && report.iou <= params.gamma_I;
}

BranchAction choose_action(std::size_t observed_area, std::size_t rendered_area) {
    return rendered_area < observed_area ? BranchAction::Duplicate : BranchAction::Remove;
}

std::vector<double> incremental_constraints_add(const ParticleState& state,
                                                const DensityField& field,
                                                const std::vector<double>& base,
                                                const HyperParams& params, std::size_t i) {
    std::vector<double> c = base;
    const double inv_rho0 = 1.0 / params.rho0;
    for (int k : field.neighbor_lists[i]) {
        double r = (state.positions[k] - state.positions[i]).norm();
        c[static_cast<std::size_t>(k)] += poly6(r, params.h) * inv_rho0;
    }
    c[i] += poly6(0.0, params.h) * inv_rho0;
    // the clone sits at the parent position, so its constraint equals the
    // parent's updated value
    c.push_back(c[i]);
    return c;
}

std::vector<double> incremental_constraints_remove(const ParticleState& state,
                                                   const DensityField& field,
                                                   const std::vector<double>& base,
                                                   const HyperParams& params, std::size_t i) {
    std::vector<double> c = base;
    const double inv_rho0 = 1.0 / params.rho0;
    for (int k : field.neighbor_lists[i]) {
        double r = (state.positions[k] - state.positions[i]).norm();
        c[static_cast<std::size_t>(k)] -= poly6(r, params.h) * inv_rho0;
    }
    c[i] = 0.0; // removed particle, entry unused
    return c;
}

BranchDecision select_particle(const ParticleState& state, const HyperParams& params,
                               BranchAction action) {
    BranchDecision decision;
    decision.action = action;
    const std::size_t n = state.size();
    if (action == BranchAction::None || n == 0) {
        decision.action = BranchAction::None;
        return decision;
    }
    if (action == BranchAction::Remove && n <= kMinParticles) {
        decision.action = BranchAction::None;
        decision.floor_refused = true;
        return decision;
    }

    DensityField field = compute_density(state, params);
    std::vector<double> base = density_constraint(field, params);
    double total = 0.0;
    for (double c : base) total += std::abs(c);

    const double inv_rho0 = 1.0 / params.rho0;
    const double self_w = poly6(0.0, params.h) * inv_rho0;

    decision.loss_table.resize(n);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double loss = total;
        if (action == BranchAction::Duplicate) {
            for (int k : field.neighbor_lists[i]) {
                double w = poly6((state.positions[k] - state.positions[i]).norm(), params.h) *
                           inv_rho0;
                loss += std::abs(base[k] + w) - std::abs(base[k]);
            }
            double parent_after = base[i] + self_w;
            loss += std::abs(parent_after) - std::abs(base[i]);
            loss += std::abs(parent_after); // the clone's own constraint
        } else {
            loss -= std::abs(base[i]);
            for (int k : field.neighbor_lists[i]) {
                double w = poly6((state.positions[k] - state.positions[i]).norm(), params.h) *
                           inv_rho0;
                loss += std::abs(base[k] - w) - std::abs(base[k]);
            }
        }
        decision.loss_table[i] = loss;
        if (loss < best) {
            best = loss;
            decision.particle_index = i;
        }
    }
    return decision;
}

Vec3 jitter_in_ball(double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec3 v;
    do {
        v = Vec3{dist(rng), dist(rng), dist(rng)};
    } while (v.norm2() > 1.0);
    return v * radius;
}

void apply_decision(ParticleState& state, const BranchDecision& decision,
                    const HyperParams& params, std::mt19937_64& rng) {
    switch (decision.action) {
        case BranchAction::None:
            break;
        case BranchAction::Duplicate: {
            Vec3 spawn = state.positions[decision.particle_index] +
                         jitter_in_ball(0.01 * params.h, rng);
            state.append(spawn, Vec3{}, spawn);
            break;
        }
        case BranchAction::Remove:
            state.remove(decision.particle_index);
            break;
    }
}

} // namespace liqrec
