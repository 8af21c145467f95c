#include "liqrec/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace liqrec {

namespace {

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

constexpr double kAlphaCutoff = 1e-4;

struct Splat {
    Projection proj;
    double radius_px = 0.0; // projected radius
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
};

Splat make_splat(const PinholeCamera& cam, const Vec3& p, const RenderSettings& settings) {
    Splat s;
    s.proj = project(cam, p);
    if (!s.proj.renderable) return s;
    s.radius_px = cam.fx * settings.sphere_radius / s.proj.depth;
    double margin = s.radius_px + 10.0 / settings.softness_k;
    s.x0 = std::max(0, static_cast<int>(std::floor(s.proj.u - margin)));
    s.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(s.proj.u + margin)));
    s.y0 = std::max(0, static_cast<int>(std::floor(s.proj.v - margin)));
    s.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(s.proj.v + margin)));
    return s;
}

} // namespace

Projection project(const PinholeCamera& camera, const Vec3& p) {
    Vec3 q = camera.to_camera(p);
    Projection proj;
    proj.depth = q.z;
    if (q.z <= 1e-6) return proj; // behind or at the camera
    proj.u = camera.cx + camera.fx * q.x / q.z;
    proj.v = camera.cy + camera.fy * q.y / q.z;
    proj.renderable = true;
    return proj;
}

SoftImage render_soft(const ParticleState& state, const PinholeCamera& camera,
                      const RenderSettings& settings) {
    // transmittance product, image value = 1 - T
    std::vector<double> trans(static_cast<std::size_t>(camera.width) * camera.height, 1.0);
    const double k = settings.softness_k;
    for (const Vec3& p : state.positions) {
        Splat sp = make_splat(camera, p, settings);
        if (!sp.proj.renderable) continue;
        for (int y = sp.y0; y <= sp.y1; ++y) {
            for (int x = sp.x0; x <= sp.x1; ++x) {
                double d = std::hypot(x - sp.proj.u, y - sp.proj.v);
                double alpha = sigmoid(k * (sp.radius_px - d));
                if (alpha < kAlphaCutoff) continue;
                trans[static_cast<std::size_t>(y) * camera.width + x] *= 1.0 - alpha;
            }
        }
    }
    SoftImage img(camera.width, camera.height);
    for (std::size_t i = 0; i < trans.size(); ++i) img.values[i] = 1.0 - trans[i];
    return img;
}

double smape_loss(const BinaryMask& observed, const SoftImage& rendered, double eps_s) {
    if (observed.width != rendered.width || observed.height != rendered.height)
        throw std::invalid_argument("smape_loss: image dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < rendered.values.size(); ++i) {
        double obs = observed.values[i];
        double ren = rendered.values[i];
        sum += std::abs(obs - ren) / (std::abs(obs) + std::abs(ren) + eps_s);
    }
    return sum / static_cast<double>(rendered.values.size());
}

double iou_masks(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("iou: mask dimensions differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        inter += a.values[i] & b.values[i];
        uni += a.values[i] | b.values[i];
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double iou_2d(const BinaryMask& observed, const SoftImage& rendered, double tau) {
    return iou_masks(observed, rendered.binarize(tau));
}

LossReport loss_gradient(const ParticleState& state, const PinholeCamera& camera,
                         const BinaryMask& observed, const RenderSettings& settings,
                         double eps_s) {
    if (observed.width != camera.width || observed.height != camera.height)
        throw std::invalid_argument("loss_gradient: mask does not match camera");

    SoftImage rendered = render_soft(state, camera, settings);

    LossReport report;
    report.smape = smape_loss(observed, rendered, eps_s);
    report.iou = iou_2d(observed, rendered, settings.binarize_tau);
    report.rendered_area = rendered.binarize(settings.binarize_tau).area();
    report.observed_area = observed.area();
    report.grad.assign(state.size(), Vec3{});

    const double n_px = static_cast<double>(rendered.values.size());
    const double k = settings.softness_k;

    for (std::size_t i = 0; i < state.size(); ++i) {
        Splat sp = make_splat(camera, state.positions[i], settings);
        if (!sp.proj.renderable) continue;
        double dl_du = 0.0, dl_dv = 0.0, dl_dr = 0.0;
        for (int y = sp.y0; y <= sp.y1; ++y) {
            for (int x = sp.x0; x <= sp.x1; ++x) {
                double d = std::hypot(x - sp.proj.u, y - sp.proj.v);
                double alpha = sigmoid(k * (sp.radius_px - d));
                if (alpha < kAlphaCutoff) continue;

                double img = rendered.at(x, y);
                double dl_dimg;
                if (observed.at(x, y)) {
                    double denom = 1.0 + img + eps_s;
                    dl_dimg = -(2.0 + eps_s) / (denom * denom) / n_px;
                } else {
                    double denom = img + eps_s;
                    dl_dimg = eps_s / (denom * denom) / n_px;
                }
                double dimg_dalpha = (1.0 - img) / std::max(1.0 - alpha, 1e-12);
                double common = dl_dimg * dimg_dalpha * alpha * (1.0 - alpha) * k;

                if (d > 1e-9) {
                    dl_du += common * (x - sp.proj.u) / d;
                    dl_dv += common * (y - sp.proj.v) / d;
                }
                dl_dr += common;
            }
        }
        // chain through projection into camera-frame, then world coordinates
        Vec3 q = camera.to_camera(state.positions[i]);
        double z = q.z;
        Vec3 dq{dl_du * camera.fx / z, dl_dv * camera.fy / z,
                -dl_du * camera.fx * q.x / (z * z) - dl_dv * camera.fy * q.y / (z * z) -
                    dl_dr * camera.fx * settings.sphere_radius / (z * z)};
        report.grad[i] = camera.rotation.transposed() * dq;
    }

    double sum = 0.0;
    for (const Vec3& g : report.grad) sum += g.norm();
    report.mean_grad_norm = state.size() ? sum / static_cast<double>(state.size()) : 0.0;
    return report;
}

namespace {

Vec3 mask_centroid_ray_dir(const PinholeCamera& cam, const BinaryMask& mask) {
    double su = 0.0, sv = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) {
                su += x;
                sv += y;
                ++n;
            }
    if (n == 0) throw std::runtime_error("triangulate_seed: empty mask");
    double u = su / static_cast<double>(n);
    double v = sv / static_cast<double>(n);
    Vec3 dir_cam{(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
    return (cam.rotation.transposed() * dir_cam).normalized();
}

} // namespace

Vec3 triangulate_seed(const PinholeCamera& cam_left, const PinholeCamera& cam_right,
                      const BinaryMask& mask_left, const BinaryMask& mask_right) {
    Vec3 o1 = cam_left.center();
    Vec3 o2 = cam_right.center();
    Vec3 d1 = mask_centroid_ray_dir(cam_left, mask_left);
    Vec3 d2 = mask_centroid_ray_dir(cam_right, mask_right);

    if (d1.cross(d2).norm() < 1e-6)
        throw std::runtime_error("triangulate_seed: near-parallel rays");

    // closest points: o1 + t1 d1, o2 + t2 d2
    Vec3 w = o1 - o2;
    double a = d1.dot(d1), b = d1.dot(d2), c = d2.dot(d2);
    double d = d1.dot(w), e = d2.dot(w);
    double denom = a * c - b * b;
    double t1 = (b * e - c * d) / denom;
    double t2 = (a * e - b * d) / denom;
    Vec3 p1 = o1 + d1 * t1;
    Vec3 p2 = o2 + d2 * t2;
    return (p1 + p2) * 0.5;
}

} // namespace liqrec
