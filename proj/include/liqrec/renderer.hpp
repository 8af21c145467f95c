#pragma once

#include <optional>
#include <vector>

#include "liqrec/camera.hpp"
#include "liqrec/image.hpp"
#include "liqrec/types.hpp"

namespace liqrec {

struct RenderSettings {
    double sphere_radius = 0.0; // meters
    double softness_k = 1.0;    // px^-1 edge sharpness
    double binarize_tau = 0.5;
};

struct Projection {
    double u = 0.0, v = 0.0;
    double depth = 0.0;
    bool renderable = false;
};

Projection project(const PinholeCamera& camera, const Vec3& p);

// Soft silhouette: each particle is a logistic-edged disk of projected radius
// fx * sphere_radius / depth; pixel value is the occlusion-free union
// 1 - prod(1 - alpha_i).
SoftImage render_soft(const ParticleState& state, const PinholeCamera& camera,
                      const RenderSettings& settings);

double smape_loss(const BinaryMask& observed, const SoftImage& rendered, double eps_s);

double iou_2d(const BinaryMask& observed, const SoftImage& rendered, double tau);
double iou_masks(const BinaryMask& a, const BinaryMask& b);

struct LossReport {
    double smape = 0.0;
    double iou = 0.0;
    std::vector<Vec3> grad;
    double mean_grad_norm = 0.0;
    std::size_t rendered_area = 0; // binarized rendering pixel count
    std::size_t observed_area = 0;
};

// Analytic dL/dp through the soft rendering and the SMAPE loss.
LossReport loss_gradient(const ParticleState& state, const PinholeCamera& camera,
                         const BinaryMask& observed, const RenderSettings& settings,
                         double eps_s);

// Midpoint of the shortest segment between the back-projected rays through the
// two mask centroids. Throws on empty masks or near-parallel rays.
Vec3 triangulate_seed(const PinholeCamera& cam_left, const PinholeCamera& cam_right,
                      const BinaryMask& mask_left, const BinaryMask& mask_right);

} // namespace liqrec
