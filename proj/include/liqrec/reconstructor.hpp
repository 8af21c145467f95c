#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "liqrec/branching.hpp"
#include "liqrec/camera.hpp"
#include "liqrec/image.hpp"
#include "liqrec/renderer.hpp"
#include "liqrec/sdf.hpp"
#include "liqrec/source.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

struct OuterIterationStats {
    double smape = 0.0;
    double iou = 0.0;
    double mean_grad_norm = 0.0;
    double mean_abs_c_rho = 0.0;
    double max_c_c = 0.0;
    std::size_t particle_count = 0;
    int branch = 0; // +1 duplicate, -1 remove, 0 none
};

struct FrameDiagnostics {
    std::vector<OuterIterationStats> outer;
    double wall_time_s = 0.0;
    int degenerate_collision_gradients = 0;
    bool cap_hit = false;
    // source bookkeeping (zero when disabled)
    Vec3 s_hat;
    double f_hat = 0.0;
};

// Per-frame solver: prediction, interleaved constraint projection and image
// gradient descent, particle-count branching, velocity update.
class Reconstructor {
public:
    Reconstructor(const VoxelSDF& sdf, std::vector<PinholeCamera> cameras, HyperParams params);

    void enable_source(const Vec3& initial_location, double initial_rate = 1.0);
    bool source_enabled() const { return source_.has_value(); }
    const SourceState* source() const { return source_ ? &*source_ : nullptr; }

    // mutates state in place; masks are one per camera
    FrameDiagnostics reconstruct_frame(ParticleState& state,
                                       const std::vector<BinaryMask>& masks);

    const HyperParams& params() const { return params_; }
    RenderSettings render_settings() const;

    // aggregate loss over all views: mean smape/iou, summed gradients
    LossReport evaluate_loss(const ParticleState& state,
                             const std::vector<BinaryMask>& masks) const;

private:
    const VoxelSDF& sdf_;
    std::vector<PinholeCamera> cameras_;
    HyperParams params_;
    std::mt19937_64 branch_rng_;
    std::optional<SourceState> source_;
};

// Four particles at the triangulated mask centroid, tetrahedral offsets of
// radius 0.3 h, zero velocities.
ParticleState seed_initial(const PinholeCamera& cam_left, const PinholeCamera& cam_right,
                           const BinaryMask& mask_left, const BinaryMask& mask_right,
                           const HyperParams& params);
ParticleState seed_at_point(const Vec3& center, const HyperParams& params);

struct SequenceResult {
    std::vector<ParticleState> states;
    std::vector<FrameDiagnostics> diagnostics;
};

SequenceResult reconstruct_sequence(Reconstructor& rec, ParticleState seed,
                                    const std::vector<std::vector<BinaryMask>>& frames);

void write_diagnostics_csv(const std::vector<FrameDiagnostics>& diags, const std::string& path,
                           bool with_source);

} // namespace liqrec
