// hydro.hpp -- law-of-large-numbers speeds for the current and tagged particle.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "ssep/heat.hpp"
#include "ssep/math_util.hpp"
#include "ssep/profile.hpp"

namespace ssep {

namespace detail {
// int_M^inf [sigma_T*gamma - rho_r](x) dx, exact tail handling:
// the step part contributes (rl-rr) * sqrt(T) * G((M-xc)/sqrt(T)) with
// G(a) = int_a^inf Phi(-u) du = phi(a) - a*Phi(-a); each compact segment
// contributes int seg (gamma-rr)(y) * Phi((y-M)/sqrt(T)) dy.
inline double heat_tail_mass(const Profile& p, double T, double M) {
    const double s = std::sqrt(T);
    const double rl = p.left_tail(), rr = p.right_tail();
    const double a = (M - p.x_lo()) / s;
    double total = (rl - rr) * s * (norm_pdf(a) - a * norm_sf(a));
    for (const auto& seg : p.segments()) {
        const double slope = (seg.y1 - seg.y0) / (seg.x1 - seg.x0);
        auto integrand = [&](double y) {
            const double g = seg.y0 + slope * (y - seg.x0);
            return (g - rr) * norm_cdf((y - M) / s);
        };
        total += adaptive_simpson(integrand, seg.x0, seg.x1, 1e-13);
    }
    return total;
}
}  // namespace detail

// v_T = int_0^inf [sigma_T*gamma - gamma](x) dx.
inline double lln_current(const Profile& p, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("lln_current: need T > 0");
    const double M = std::max(p.x_hi(), 0.0) + 10.0 * std::sqrt(T);
    // smooth part by quadrature, profile part in closed form
    double v = adaptive_simpson([&](double x) { return heat_convolve(p, T, x); },
                                0.0, M, 1e-12);
    v -= p.integrate(0.0, M);
    v += detail::heat_tail_mass(p, T, M);  // gamma == rho_r beyond M
    return v;
}

// int_0^alpha (sigma_T*gamma)(x) dx by adaptive quadrature.
inline double heat_mass(const Profile& p, double T, double alpha) {
    if (alpha == 0.0) return 0.0;
    return adaptive_simpson([&](double x) { return heat_convolve(p, T, x); },
                            0.0, alpha, 1e-12);
}

// u_T: the unique root of F(alpha) = int_0^alpha sigma_T*gamma - v_T.
inline double lln_tagged(const Profile& p, double T, double* v_out = nullptr) {
    const double v = lln_current(p, T);
    if (v_out) *v_out = v;
    auto F = [&](double alpha) { return heat_mass(p, T, alpha) - v; };
    const double r = std::max(std::abs(p.x_lo()), std::abs(p.x_hi())) + 10.0 * std::sqrt(T);
    auto [lo, hi] = expand_bracket(F, -r, r);
    return bisect(F, lo, hi, 1e-11);
}

struct LlnResult {
    double v_T = 0.0;
    double u_T = 0.0;
    std::function<double(double)> profile_at_T;
};

inline LlnResult lln(const Profile& p, double T) {
    LlnResult r;
    r.u_T = lln_tagged(p, T, &r.v_T);
    r.profile_at_T = [p, T](double x) { return heat_convolve(p, T, x); };
    return r;
}

}  // namespace ssep
