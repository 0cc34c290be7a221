// heat.hpp -- heat-kernel evolution of profiles.
//
// sigma_t * gamma is split into a step part (exact via the Gaussian CDF,
// jump placed at x_lo) plus a compactly supported remainder integrated by
// adaptive Simpson segment by segment. No truncation error enters through
// the tails.
#pragma once

#include <cmath>
#include <stdexcept>

#include "ssep/math_util.hpp"
#include "ssep/profile.hpp"

namespace ssep {

inline double heat_kernel(double t, double y) {
    return std::exp(-y * y / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

// (sigma_t * gamma)(x); absolute error <= ~1e-10.
inline double heat_convolve(const Profile& p, double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_convolve: need t > 0");
    const double s = std::sqrt(t);
    const double rl = p.left_tail(), rr = p.right_tail();
    const double xc = p.x_lo();
    // step part: rr + (rl - rr) * Phi((xc - x)/sqrt(t))
    double value = rr + (rl - rr) * norm_cdf((xc - x) / s);
    // remainder gamma - step, supported on (x_lo, x_hi]
    for (const auto& seg : p.segments()) {
        const double slope = (seg.y1 - seg.y0) / (seg.x1 - seg.x0);
        auto integrand = [&](double y) {
            const double g = seg.y0 + slope * (y - seg.x0);
            return (g - rr) * heat_kernel(t, x - y);
        };
        value += adaptive_simpson(integrand, seg.x0, seg.x1, 1e-13);
    }
    return value;
}

// d/dx (sigma_t * gamma)(x), same decomposition.
inline double heat_convolve_dx(const Profile& p, double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_convolve_dx: need t > 0");
    const double s = std::sqrt(t);
    const double rl = p.left_tail(), rr = p.right_tail();
    const double xc = p.x_lo();
    double value = -(rl - rr) * norm_pdf((xc - x) / s) / s;
    for (const auto& seg : p.segments()) {
        const double slope = (seg.y1 - seg.y0) / (seg.x1 - seg.x0);
        auto integrand = [&](double y) {
            const double g = seg.y0 + slope * (y - seg.x0);
            return (g - rr) * heat_kernel(t, x - y) * (y - x) / t;
        };
        value += adaptive_simpson(integrand, seg.x0, seg.x1, 1e-13);
    }
    return value;
}

}  // namespace ssep
