#include "liqrec/simharness.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "liqrec/branching.hpp"
#include "liqrec/density.hpp"
#include "liqrec/dynamics.hpp"
#include "liqrec/renderer.hpp"
#include "liqrec/surface.hpp"

namespace liqrec {

void ScenarioSpec::validate() const {
    params.validate();
    if (scene.empty()) throw std::invalid_argument("scenario: empty scene");
    if (frames < 0) throw std::invalid_argument("scenario: frames must be >= 0");
    if (emit_rate < 0.0) throw std::invalid_argument("scenario: emit rate must be >= 0");
    if (cameras.empty()) throw std::invalid_argument("scenario: need at least one camera");
    for (const auto& cam : cameras) cam.validate();
    if (blob_min.has_value() != blob_max.has_value())
        throw std::invalid_argument("scenario: blob needs both corners");
}

namespace {

// resting-distance HCP packing of an axis-aligned block
std::vector<Vec3> pack_block(const Vec3& lo, const Vec3& hi, double spacing) {
    std::vector<Vec3> pts;
    const double ax = spacing;
    const double ay = spacing * std::sqrt(3.0) / 2.0;
    const double az = spacing * std::sqrt(2.0 / 3.0);
    int k = 0;
    for (double z = lo.z; z <= hi.z; z += az, ++k) {
        int j = 0;
        for (double y = lo.y + ((k % 2) / 3.0) * ay; y <= hi.y; y += ay, ++j) {
            double xoff = 0.5 * std::abs((j + k) % 2) * ax;
            for (double x = lo.x + xoff; x <= hi.x; x += ax) pts.push_back({x, y, z});
        }
    }
    return pts;
}

} // namespace

SimulationResult simulate(const ScenarioSpec& spec) {
    spec.validate();
    SimulationResult result;
    result.sdf = build_sdf_from_scene(spec.scene, spec.grid);
    HyperParams params = with_resting_density(spec.params);

    RenderSettings settings;
    settings.sphere_radius = params.render_radius();
    settings.softness_k = params.softness_k;
    settings.binarize_tau = params.binarize_tau;

    ParticleState state;
    if (spec.blob_min) {
        for (const Vec3& p : pack_block(*spec.blob_min, *spec.blob_max,
                                        params.resting_distance()))
            state.append(p, Vec3{}, p);
    }

    std::mt19937_64 rng(params.rng_seed);
    double emit_carry = 0.0;

    for (int f = 0; f < spec.frames; ++f) {
        if (f < spec.emit_frames) {
            emit_carry += spec.emit_rate;
            while (emit_carry >= 1.0) {
                emit_carry -= 1.0;
                if (state.size() >= params.particle_cap)
                    throw std::runtime_error("simulate: particle cap exceeded");
                Vec3 p = spec.emitter + jitter_in_ball(0.2 * params.h, rng);
                state.append(p, Vec3{}, p);
            }
        }

        predict(state, params);
        for (int c = 0; c < params.n_c; ++c) {
            CollisionResult col = solve_collision(result.sdf, state);
            for (std::size_t i = 0; i < state.size(); ++i)
                state.positions[i] += col.displacements[i];
            DensityStep den = solve_density(state, params);
            for (std::size_t i = 0; i < state.size(); ++i)
                state.positions[i] += den.displacements[i];
        }
        induce_velocity(state, params);
        if (state.size() > 0) {
            DensityField field = compute_density(state, params);
            apply_xsph(state, field, params);
        }

        if (!state.finite())
            throw numeric_error("simulate: non-finite state at frame " + std::to_string(f));

        result.states.push_back(state);
        std::vector<BinaryMask> frame_masks;
        for (const auto& cam : spec.cameras) {
            SoftImage img = render_soft(state, cam, settings);
            frame_masks.push_back(img.binarize(params.binarize_tau));
        }
        result.masks.push_back(std::move(frame_masks));
    }
    return result;
}

std::vector<EvaluationRow> evaluate(const std::vector<ParticleState>& gt,
                                    const std::vector<ParticleState>& recon,
                                    const GridSpec& grid, const HyperParams& params_in) {
    if (gt.size() != recon.size())
        throw std::invalid_argument("evaluate: sequence lengths differ");
    HyperParams params = with_resting_density(params_in);
    const double threshold = 0.5 * interior_color_value(params);

    std::vector<EvaluationRow> rows;
    for (std::size_t f = 0; f < gt.size(); ++f) {
        EvaluationRow row;
        row.n_gt = gt[f].size();
        row.n_rec = recon[f].size();
        OccupancyGrid vg = voxelize(gt[f], params, grid, threshold);
        OccupancyGrid vr = voxelize(recon[f], params, grid, threshold);
        row.iou3d = iou_3d(vg, vr);
        if (recon[f].size() > 0) {
            DensityField field = compute_density(recon[f], params);
            std::vector<double> c = density_constraint(field, params);
            double sum = 0.0;
            for (double v : c) sum += std::abs(v);
            row.mean_abs_c_rho = sum / static_cast<double>(c.size());
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace liqrec
