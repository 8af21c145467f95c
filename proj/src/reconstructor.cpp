#include "liqrec/reconstructor.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "liqrec/density.hpp"
#include "liqrec/dynamics.hpp"

namespace liqrec {

Reconstructor::Reconstructor(const VoxelSDF& sdf, std::vector<PinholeCamera> cameras,
                             HyperParams params)
    : sdf_(sdf), cameras_(std::move(cameras)), params_(with_resting_density(std::move(params))),
      branch_rng_(params_.rng_seed) {
    if (cameras_.empty()) throw std::invalid_argument("Reconstructor: need at least one camera");
    params_.validate();
    for (const auto& cam : cameras_) cam.validate();
}

void Reconstructor::enable_source(const Vec3& initial_location, double initial_rate) {
    SourceState src;
    src.s_hat = initial_location;
    src.f_hat = initial_rate;
    // independent stream so enabling the source does not disturb branch jitter
    src.rng.seed(params_.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    source_ = src;
}

RenderSettings Reconstructor::render_settings() const {
    RenderSettings s;
    s.sphere_radius = params_.render_radius();
    s.softness_k = params_.softness_k;
    s.binarize_tau = params_.binarize_tau;
    return s;
}

LossReport Reconstructor::evaluate_loss(const ParticleState& state,
                                        const std::vector<BinaryMask>& masks) const {
    const RenderSettings settings = render_settings();
    LossReport total;
    total.grad.assign(state.size(), Vec3{});
    for (std::size_t v = 0; v < cameras_.size(); ++v) {
        LossReport r = loss_gradient(state, cameras_[v], masks[v], settings, params_.eps_s);
        total.smape += r.smape;
        total.iou += r.iou;
        total.rendered_area += r.rendered_area;
        total.observed_area += r.observed_area;
        for (std::size_t i = 0; i < state.size(); ++i) total.grad[i] += r.grad[i];
    }
    const double nv = static_cast<double>(cameras_.size());
    total.smape /= nv;
    total.iou /= nv;
    double sum = 0.0;
    for (const Vec3& g : total.grad) sum += g.norm();
    total.mean_grad_norm = state.size() ? sum / static_cast<double>(state.size()) : 0.0;
    return total;
}

FrameDiagnostics Reconstructor::reconstruct_frame(ParticleState& state,
                                                  const std::vector<BinaryMask>& masks) {
    if (masks.size() != cameras_.size())
        throw std::invalid_argument("reconstruct_frame: one mask per camera required");
    const auto t0 = std::chrono::steady_clock::now();
    FrameDiagnostics diag;

    bool all_empty = true;
    for (const auto& m : masks)
        if (!m.empty_mask()) all_empty = false;
    if (state.size() == 0 && all_empty) return diag; // nothing to do

    predict(state, params_);

    InsertionRecord inserted;
    if (source_) inserted = insert_source_particles(state, *source_, params_);
    diag.cap_hit = inserted.cap_hit;

    int delta_n = 0;
    for (int o = 0; o < params_.n_o; ++o) {
        for (int j = 0; j < params_.n_j; ++j) {
            for (int c = 0; c < params_.n_c; ++c) {
                CollisionResult col = solve_collision(sdf_, state);
                diag.degenerate_collision_gradients += col.degenerate_gradients;
                for (std::size_t i = 0; i < state.size(); ++i)
                    state.positions[i] += col.displacements[i];
                DensityStep den = solve_density(state, params_);
                for (std::size_t i = 0; i < state.size(); ++i)
                    state.positions[i] += den.displacements[i];
            }
            for (int i = 0; i < params_.n_i; ++i) {
                LossReport r = evaluate_loss(state, masks);
                for (std::size_t k = 0; k < state.size(); ++k)
                    state.positions[k] -= params_.alpha_I * r.grad[k];
            }
        }

        LossReport report = evaluate_loss(state, masks);
        OuterIterationStats stats;
        stats.smape = report.smape;
        stats.iou = report.iou;
        stats.mean_grad_norm = report.mean_grad_norm;
        stats.particle_count = state.size();
        if (state.size() > 0) {
            DensityField field = compute_density(state, params_);
            std::vector<double> c = density_constraint(field, params_);
            double sum = 0.0;
            for (double v : c) sum += std::abs(v);
            stats.mean_abs_c_rho = sum / static_cast<double>(c.size());
            for (const Vec3& p : state.positions)
                stats.max_c_c = std::max(stats.max_c_c, collision_constraint(sdf_, p));
        }

        if (detect_local_minimum(report, params_)) {
            BranchAction action = choose_action(report.observed_area, report.rendered_area);
            if (action == BranchAction::Duplicate && state.size() >= params_.particle_cap) {
                diag.cap_hit = true;
            } else {
                BranchDecision decision = select_particle(state, params_, action);
                if (decision.action == BranchAction::Duplicate) {
                    apply_decision(state, decision, params_, branch_rng_);
                    stats.branch = 1;
                    ++delta_n;
                } else if (decision.action == BranchAction::Remove) {
                    // keep the source insertion record aligned across removals
                    for (std::size_t s = 0; s < inserted.indices.size();) {
                        if (inserted.indices[s] == decision.particle_index) {
                            inserted.indices.erase(inserted.indices.begin() + s);
                            inserted.spawn_positions.erase(inserted.spawn_positions.begin() + s);
                        } else {
                            if (inserted.indices[s] > decision.particle_index)
                                --inserted.indices[s];
                            ++s;
                        }
                    }
                    apply_decision(state, decision, params_, branch_rng_);
                    stats.branch = -1;
                    --delta_n;
                }
            }
        }
        diag.outer.push_back(stats);

        if (!state.finite())
            throw numeric_error("reconstruct_frame: non-finite particle state at outer "
                                     "iteration " + std::to_string(o));
    }

    induce_velocity(state, params_);
    if (state.size() > 0) {
        DensityField field = compute_density(state, params_);
        apply_xsph(state, field, params_);
    }

    if (source_) {
        std::vector<Vec3> post;
        post.reserve(inserted.indices.size());
        std::vector<Vec3> pre = inserted.spawn_positions;
        for (std::size_t idx : inserted.indices) post.push_back(state.positions[idx]);
        pre.resize(post.size());
        update_source_location(*source_, pre, post);
        update_flow_rate(*source_, static_cast<double>(delta_n));
        diag.s_hat = source_->s_hat;
        diag.f_hat = source_->f_hat;
    }

    diag.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return diag;
}

ParticleState seed_at_point(const Vec3& center, const HyperParams& params) {
    const double r = 0.3 * params.h;
    const double s = r / std::sqrt(3.0);
    const Vec3 offsets[4] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
    ParticleState state;
    for (const Vec3& off : offsets) {
        Vec3 p = center + off;
        state.append(p, Vec3{}, p);
    }
    return state;
}

ParticleState seed_initial(const PinholeCamera& cam_left, const PinholeCamera& cam_right,
                           const BinaryMask& mask_left, const BinaryMask& mask_right,
                           const HyperParams& params) {
    Vec3 center = triangulate_seed(cam_left, cam_right, mask_left, mask_right);
    return seed_at_point(center, params);
}

SequenceResult reconstruct_sequence(Reconstructor& rec, ParticleState seed,
                                    const std::vector<std::vector<BinaryMask>>& frames) {
    if (frames.empty()) throw std::invalid_argument("reconstruct_sequence: no frames");
    SequenceResult result;
    ParticleState state = std::move(seed);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        try {
            result.diagnostics.push_back(rec.reconstruct_frame(state, frames[f]));
        } catch (const numeric_error& e) {
            throw numeric_error("frame " + std::to_string(f) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("frame " + std::to_string(f) + ": " + e.what());
        }
        result.states.push_back(state);
    }
    return result;
}

void write_diagnostics_csv(const std::vector<FrameDiagnostics>& diags, const std::string& path,
                           bool with_source) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "frame,outer,smape,iou,mean_grad_norm,mean_abs_c_rho,max_c_c,n,branch";
    if (with_source) out << ",s_hat_x,s_hat_y,s_hat_z,f_hat";
    out << "\n";
    out.precision(10);
    for (std::size_t f = 0; f < diags.size(); ++f) {
        const FrameDiagnostics& d = diags[f];
        for (std::size_t o = 0; o < d.outer.size(); ++o) {
            const OuterIterationStats& s = d.outer[o];
            out << f << "," << o << "," << s.smape << "," << s.iou << "," << s.mean_grad_norm
                << "," << s.mean_abs_c_rho << "," << s.max_c_c << "," << s.particle_count
                << "," << s.branch;
            if (with_source)
                out << "," << d.s_hat.x << "," << d.s_hat.y << "," << d.s_hat.z << ","
                    << d.f_hat;
            out << "\n";
        }
    }
}

} // namespace liqrec
