// field.hpp -- density / drift / current triples on a space-time grid and the
// quadratures evaluated on them.
//
// Layout: mu holds node values at times k = 0..nt; h and j live on faces at
// time midpoints, one row per step. j is the conserved numerical flux, so
// (mu[k+1]-mu[k])/dt + (j[k][f]-j[k][f-1])/dx = 0 holds exactly at interior
// nodes.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssep/grid.hpp"
#include "ssep/math_util.hpp"
#include "ssep/profile.hpp"

namespace ssep {

inline constexpr double kDensityClip = 1e-6;  // clamp inside logs and quotients

inline double clip01(double v) {
    return v < kDensityClip ? kDensityClip : (v > 1.0 - kDensityClip ? 1.0 - kDensityClip : v);
}

struct FieldTriple {
    SpaceTimeGrid grid;
    Array2 mu;  // (nt+1) x nx
    Array2 h;   // nt x (nx-1)
    Array2 j;   // nt x (nx-1)

    // face- and time-averaged density at step k, face f
    double mu_face(int k, int f) const {
        return 0.25 * (mu(k, f) + mu(k, f + 1) + mu(k + 1, f) + mu(k + 1, f + 1));
    }
};

// I_0 = (1/2) int int H^2 mu(1-mu) dx dt, midpoint in time, faces in space.
// The density factor is clamped into [delta, 1-delta] like every other
// quotient of the field quadratures.
inline double i0_evaluate(const FieldTriple& f) {
    const double w = 0.5 * f.grid.dx() * f.grid.dt();
    double total = 0.0;
    for (int k = 0; k < f.grid.nt; ++k)
        for (int q = 0; q < f.grid.faces(); ++q) {
            const double m = clip01(f.mu_face(k, q));
            const double hv = f.h(k, q);
            total += w * hv * hv * m * (1.0 - m);
        }
    return total;
}

// h_d(a;b) = a log(a/b) + (1-a) log((1-a)/(1-b)) with 0 log 0 = 0/0 = 0.
inline double binary_relative_entropy(double a, double b) {
    double s = 0.0;
    if (a > 0.0) {
        if (b <= 0.0) return std::numeric_limits<double>::infinity();
        s += a * std::log(a / b);
    }
    if (a < 1.0) {
        if (b >= 1.0) return std::numeric_limits<double>::infinity();
        s += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    }
    return s;
}

// int h_d(mu0(x); gamma(x)) dx over the grid (trapezoid); +inf propagates.
inline double relative_entropy(const SpaceTimeGrid& g, const double* mu0, const Profile& gamma) {
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double term = binary_relative_entropy(mu0[i], gamma(g.x(i)));
        if (std::isinf(term)) return term;
        total += term * ((i == 0 || i == g.nx - 1) ? 0.5 : 1.0);
    }
    return total * g.dx();
}

// Time integral of the flux at a point: trapezoid in time is already built in
// (j lives at midpoints), linear interpolation between the two nearest faces.
inline double integrated_current(const FieldTriple& f, double x) {
    const auto& g = f.grid;
    if (x < -g.L || x > g.L) throw std::invalid_argument("integrated_current: x outside grid");
    const double u = (x - g.xf(0)) / g.dx();
    int f0 = static_cast<int>(std::floor(u));
    f0 = std::max(0, std::min(f0, g.faces() - 2));
    const double wgt = std::min(1.0, std::max(0.0, u - f0));
    double total = 0.0;
    for (int k = 0; k < g.nt; ++k)
        total += (1.0 - wgt) * f.j(k, f0) + wgt * f.j(k, f0 + 1);
    return total * g.dt();
}

// Residual of the decomposition
//   I_0 = (1/8) iint (d_x mu)^2 / (mu(1-mu)) + (1/2)[h(mu_T;gh) - h(mu_0;gh)]
//       + (1/2) int gh'/(gh(1-gh)) * (int_0^T J dt) dx + (1/2) iint J^2/(mu(1-mu)).
// gh is a smooth strictly interior reference profile supplied with its
// derivative. Quadrature error is O(dx^2 + dt^2) for smooth exact fields.
template <class GammaHat, class GammaHatDx>
double energy_identity_check(const FieldTriple& f, const GammaHat& gh, const GammaHatDx& gh_dx) {
    const auto& g = f.grid;
    const double dx = g.dx(), dt = g.dt();
    double grad_term = 0.0, quad_term = 0.0;
    for (int k = 0; k < g.nt; ++k)
        for (int q = 0; q < g.faces(); ++q) {
            const double m = clip01(f.mu_face(k, q));
            const double denom = m * (1.0 - m);
            const double dmu =
                0.5 * ((f.mu(k, q + 1) - f.mu(k, q)) + (f.mu(k + 1, q + 1) - f.mu(k + 1, q))) / dx;
            grad_term += dmu * dmu / denom;
            quad_term += f.j(k, q) * f.j(k, q) / denom;
        }
    grad_term *= 0.125 * dx * dt;
    quad_term *= 0.5 * dx * dt;

    auto entropy_row = [&](int k) {
        double total = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double w = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            total += w * binary_relative_entropy(clip01(f.mu(k, i)), clip01(gh(g.x(i))));
        }
        return total * dx;
    };
    const double entropy_diff = 0.5 * (entropy_row(g.nt) - entropy_row(0));

    double cross = 0.0;
    for (int q = 0; q < g.faces(); ++q) {
        const double xq = g.xf(q);
        const double ghv = clip01(gh(xq));
        double Jint = 0.0;
        for (int k = 0; k < g.nt; ++k) Jint += f.j(k, q);
        Jint *= dt;
        cross += gh_dx(xq) / (ghv * (1.0 - ghv)) * Jint;
    }
    cross *= 0.5 * dx;

    const double rhs = grad_term + entropy_diff + cross + quad_term;
    return std::abs(i0_evaluate(f) - rhs);
}

}  // namespace ssep
