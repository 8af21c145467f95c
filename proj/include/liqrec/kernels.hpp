#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace liqrec {

inline void check_radius(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel radius h must be > 0");
}

// Poly6 density kernel: 315/(64 pi h^9) (h^2 - r^2)^3 for r < h, else 0.
inline double poly6(double r, double h) {
    check_radius(h);
    if (r >= h) return 0.0;
    double hh = h * h;
    double t = hh - r * r;
    return 315.0 / (64.0 * std::numbers::pi * std::pow(h, 9)) * t * t * t;
}

// dW/dr of Poly6: -945/(32 pi h^9) r (h^2 - r^2)^2 for r < h, else 0.
inline double poly6_deriv(double r, double h) {
    check_radius(h);
    if (r >= h) return 0.0;
    double t = h * h - r * r;
    return -945.0 / (32.0 * std::numbers::pi * std::pow(h, 9)) * r * t * t;
}

// Spiky kernel value: 15/(pi h^6) (h - r)^3 for r < h, else 0.
inline double spiky(double r, double h) {
    check_radius(h);
    if (r >= h) return 0.0;
    double t = h - r;
    return 15.0 / (std::numbers::pi * std::pow(h, 6)) * t * t * t;
}

// dW/dr of Spiky: -45/(pi h^6) (h - r)^2 for 0 < r < h, else 0.
// Zero at r = 0: the pair direction is undefined there and callers skip it.
inline double spiky_grad_magnitude(double r, double h) {
    check_radius(h);
    if (r <= 0.0 || r >= h) return 0.0;
    double t = h - r;
    return -45.0 / (std::numbers::pi * std::pow(h, 6)) * t * t;
}

} // namespace liqrec
