// trialbounds.hpp -- closed-form trial densities
//   mu(s,x) = sigma_s*gamma(x) + lambda eps(s/T) psi(x/L)
// their drift and current fields, the explicit rate upper bound they give,
// the cubic lower-bound expression, and the degenerate-block tail bound.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssep/bump.hpp"
#include "ssep/field.hpp"
#include "ssep/grid.hpp"
#include "ssep/heat.hpp"
#include "ssep/hydro.hpp"
#include "ssep/math_util.hpp"
#include "ssep/profile.hpp"
#include "ssep/ratecurve.hpp"

namespace ssep {

// gamma_* and gamma^*: bounds on sigma_{T/10}*gamma (fine sampling + tails).
struct SmoothedRange {
    double lo = 0.0, hi = 1.0;
};

inline SmoothedRange smoothed_range(const Profile& p, double T) {
    const double s = T / 10.0;
    const double pad = 8.0 * std::sqrt(s);
    const double a = p.x_lo() - pad, b = p.x_hi() + pad;
    SmoothedRange r;
    r.lo = std::min(p.left_tail(), p.right_tail());
    r.hi = std::max(p.left_tail(), p.right_tail());
    const int n = 1600;
    for (int i = 0; i <= n; ++i) {
        const double v = heat_convolve(p, s, a + (b - a) * i / n);
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
    }
    return r;
}

inline double lambda_cap(const SmoothedRange& r) { return 0.5 * std::min(r.lo, 1.0 - r.hi); }

// Samples the closed-form trial density and drift on a grid. The drift is
// supported on [T/10, T] x [-|L|, |L|].
inline FieldTriple trial_field(const Profile& p, double T, double lambda, double L,
                               const SpaceTimeGrid& g) {
    if (g.T != T) throw std::invalid_argument("trial_field: grid horizon mismatch");
    const auto& B = bumps();
    const SmoothedRange r = smoothed_range(p, T);
    if (lambda < 0.0 || lambda > lambda_cap(r) * (1.0 + 1e-9))
        throw std::invalid_argument("trial_field: lambda out of admissible range");
    if (L == 0.0) throw std::invalid_argument("trial_field: L must be nonzero");

    FieldTriple out;
    out.grid = g;
    out.mu = Array2(g.nt + 1, g.nx);
    out.h = Array2(g.nt, g.faces());
    out.j = Array2(g.nt, g.faces());

    auto density = [&](double s, double x) {
        const double base = s > 0.0 ? heat_convolve(p, s, x) : p(x);
        return base + lambda * B.eps(s / T) * psi_bump(x / L);
    };
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.nx; ++i) out.mu(k, i) = density(g.t_node(k), g.x(i));

    for (int k = 0; k < g.nt; ++k) {
        const double s = g.t_mid(k);
        const double e = B.eps(s / T), ep = B.eps_prime(s / T);
        for (int f = 0; f < g.faces(); ++f) {
            const double x = g.xf(f);
            // drift numerator: lambda eps/(2L) psi'(x/L) - lambda L eps'/T Psi(x/L)
            double numer = 0.0;
            if (std::abs(x) < std::abs(L) && s >= T / 10.0) {
                numer = lambda * e / (2.0 * L) * psi_bump_prime(x / L) -
                        lambda * L * ep / T * B.Psi(x / L);
                const double m = clip01(density(s, x));
                out.h(k, f) = numer / (m * (1.0 - m));
            }
            // current: -(1/2) d_x sigma_s*gamma - (lambda L eps'/T) Psi(x/L)
            const double base_dx = heat_convolve_dx(p, s, x);
            out.j(k, f) = -0.5 * base_dx - lambda * L * ep / T * B.Psi(x / L);
        }
    }
    return out;
}

// Explicit bound on I_0 of the trial field:
//   4 eps*/(g_*(1-g^*)) [ lambda^2 T/(4|L|) int psi'^2 + lambda^2 |L|^3/T int Psi^2 ].
inline double trial_i0_bound(double lambda, double L, double T, const SmoothedRange& r) {
    const auto& B = bumps();
    const double pref = 4.0 * B.eps_star() / (r.lo * (1.0 - r.hi));
    const double absL = std::abs(L);
    return pref * (lambda * lambda * T / (4.0 * absL) * B.int_psi_prime_sq() +
                   lambda * lambda * absL * absL * absL / T * B.int_Psi_sq());
}

struct TrialParams {
    double lambda = 0.0;
    double L = 1.0;  // signed
};

// Current constraint: lambda L int_0^1 psi = a - v_T, with L = kappa sqrt(T),
// kappa = max(1, kappa0 |a - v_T| / sqrt(T)) so lambda stays admissible.
inline TrialParams solve_constraint_current(const Profile& p, double T, double a,
                                            double v_T = std::numeric_limits<double>::quiet_NaN()) {
    const auto& B = bumps();
    if (std::isnan(v_T)) v_T = lln_current(p, T);
    const double gap = a - v_T;
    if (gap == 0.0) return {0.0, std::sqrt(T)};
    const SmoothedRange r = smoothed_range(p, T);
    const double cap = lambda_cap(r);
    const double kappa0 = 1.0 / (cap * B.int_psi_01());
    const double kappa = std::max(1.0, kappa0 * std::abs(gap) / std::sqrt(T));
    TrialParams tp;
    tp.L = (gap > 0.0 ? 1.0 : -1.0) * kappa * std::sqrt(T);
    tp.lambda = gap / (tp.L * B.int_psi_01());
    return tp;
}

// Tagged constraint: lambda L int_{|a|/|L|}^1 psi = int_{u_T}^a sigma_T*gamma.
// lambda is pinned just below its cap; |L| is a root in (|a|, inf).
inline TrialParams solve_constraint_tagged(const Profile& p, double T, double a) {
    const auto& B = bumps();
    const double u_T = lln_tagged(p, T);
    const double R = heat_mass(p, T, a) - heat_mass(p, T, u_T);
    if (R == 0.0) return {0.0, std::sqrt(T)};
    const SmoothedRange r = smoothed_range(p, T);
    const double lambda = 0.9 * lambda_cap(r);
    const double sgn = R > 0.0 ? 1.0 : -1.0;
    auto fold = [&](double ell) { return lambda * ell * B.int_psi_tail(std::abs(a) / ell) -
                                         std::abs(R); };
    double lo = std::abs(a) + 1e-9, hi = std::max(2.0 * std::abs(a) + 1.0, std::sqrt(T));
    while (fold(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("solve_constraint_tagged: no admissible L");
    }
    const double ell = bisect(fold, lo, hi, 1e-12 * std::max(1.0, std::abs(R)));
    return {lambda, sgn * ell};
}

enum class RateTarget { current, tagged };

// Bound curve from the explicit construction; the tagged case reduces to a
// current bound for the shifted profile at target int_0^a gamma.
inline RateCurve upper_bound_curve(const Profile& p, double T, const std::vector<double>& a_list,
                                   RateTarget kind) {
    RateCurve out;
    const double v_T = kind == RateTarget::current ? lln_current(p, T) : 0.0;
    const SmoothedRange r = smoothed_range(p, T);
    for (double a : a_list) {
        RatePoint pt;
        pt.a = a;
        pt.kind = CurveKind::upper_bound;
        if (kind == RateTarget::current) {
            const TrialParams tp = solve_constraint_current(p, T, a, v_T);
            pt.value = tp.lambda == 0.0 ? 0.0 : trial_i0_bound(tp.lambda, tp.L, T, r);
        } else {
            const Profile shifted = p.shifted(a);
            const double target = p.integrate(0.0, a);
            const TrialParams tp = solve_constraint_current(shifted, T, target);
            pt.value = tp.lambda == 0.0 ? 0.0 : trial_i0_bound(tp.lambda, tp.L, T, r);
        }
        out.points.push_back(pt);
    }
    return out;
}

// Reference profiles for the cubic lower bound: a heat-smoothed copy supplies
// both the value and the derivative.
struct SmoothedProfile {
    Profile base;
    double alpha = 0.5;
    double operator()(double x) const { return heat_convolve(base, alpha, x); }
    double dx(double x) const { return heat_convolve_dx(base, alpha, x); }
};

// (|a|-eps)^3/(3T) - (1/2) h(gamma; gamma_hat) - T int (gamma_hat')^2 /
// (gamma_hat^2 (1-gamma_hat)^2) - (3/2) eps. May be negative (uninformative).
inline double lower_bound_cubic(const Profile& p, double T, double a, double eps,
                                const SmoothedProfile& gh) {
    const double pad = std::max(10.0 * std::sqrt(gh.alpha), 2.0) + 2.0;
    const double lo = std::min(p.x_lo(), gh.base.x_lo()) - pad;
    const double hi = std::max(p.x_hi(), gh.base.x_hi()) + pad;
    const double entropy = adaptive_simpson(
        [&](double x) { return binary_relative_entropy(p(x), clip01(gh(x))); }, lo, hi, 1e-11);
    const double grad = adaptive_simpson(
        [&](double x) {
            const double v = clip01(gh(x));
            const double d = gh.dx(x);
            const double q = v * (1.0 - v);
            return d * d / (q * q);
        },
        lo, hi, 1e-11);
    const double lead = std::abs(a) - eps;
    return lead * lead * lead / (3.0 * T) - 0.5 * entropy - T * grad - 1.5 * eps;
}

// Exponential-rate upper bound for deviations of the block configuration
// 1_{[-1,1]}: for 0 <= a <= 1 the Chernoff expression minimized over the
// tilt, for a >= 1 its closed-form optimum. Current deviations above 1 are
// impossible and get -inf.
inline double block_tail_bound(double a, double t, RateTarget kind = RateTarget::tagged) {
    if (a < 0.0 || !(t > 0.0)) throw std::invalid_argument("block_tail_bound: need a >= 0, t > 0");
    const double s = std::sqrt(t);
    if (a > 1.0) {
        if (kind == RateTarget::current) return -std::numeric_limits<double>::infinity();
        // I = int_{-1}^1 P(N(0,t) > a - x) dx
        const double I = integral_norm_cdf_rising(-1.0, 1.0, a, s);
        return std::log(I) + 1.0 - I;
    }
    // P(N(0,t) > a-x) = Phi((x-a)/s); P(N(0,t) <= a-x) = Phi((a-x)/s)
    const double A = integral_norm_cdf_rising(-1.0, a, a, s);
    const double Bq = integral_norm_cdf_falling(a, 1.0, a, s);
    auto objective = [&](double lam) {
        return -lam * a + 0.5 * std::expm1(2.0 * lam) * A + 0.5 * std::expm1(-2.0 * lam) * Bq;
    };
    const double lam = golden_min(objective, 0.0, 10.0, 1e-11);
    return std::min(objective(lam), objective(0.0));
}

}  // namespace ssep
