#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liqrec/camera.hpp"
#include "liqrec/image.hpp"
#include "liqrec/sdf.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

// Ground-truth scenario: scene geometry, an emitter and/or a pre-placed blob,
// cameras, and the shared solver parameters.
struct ScenarioSpec {
    std::vector<ScenePrimitive> scene;
    GridSpec grid;
    std::vector<PinholeCamera> cameras;
    HyperParams params;

    int frames = 0;

    Vec3 emitter;
    double emit_rate = 0.0; // particles per frame
    int emit_frames = 0;

    // optional block of particles packed at the resting distance
    std::optional<Vec3> blob_min, blob_max;

    void validate() const;
};

struct SimulationResult {
    VoxelSDF sdf;
    std::vector<ParticleState> states;                 // one per frame
    std::vector<std::vector<BinaryMask>> masks;        // [frame][camera]
};

// Forward position-based simulation reusing the collision and density solvers;
// masks are the binarized soft renderings of the ground truth.
SimulationResult simulate(const ScenarioSpec& spec);

struct EvaluationRow {
    double iou3d = 0.0;
    double mean_abs_c_rho = 0.0;
    std::size_t n_gt = 0;
    std::size_t n_rec = 0;
};

std::vector<EvaluationRow> evaluate(const std::vector<ParticleState>& gt,
                                    const std::vector<ParticleState>& recon,
                                    const GridSpec& grid, const HyperParams& params);

} // namespace liqrec
