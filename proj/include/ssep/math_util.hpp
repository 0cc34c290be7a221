// math_util.hpp -- quadrature, root finding, Gaussian helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace ssep {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrtPi = 1.77245385090551602730;

// Standard normal density and CDF.
inline double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
inline double norm_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// Antiderivative helper: int_{-inf}^{z} Phi(u) du = z*Phi(z) + phi(z).
inline double norm_cdf_antideriv(double z) { return z * norm_cdf(z) + norm_pdf(z); }

// int_{x1}^{x2} Phi((c - x)/s) dx, s > 0, in closed form.
inline double integral_norm_cdf_falling(double x1, double x2, double c, double s) {
    const double u1 = (c - x1) / s, u2 = (c - x2) / s;
    return s * (norm_cdf_antideriv(u1) - norm_cdf_antideriv(u2));
}

// int_{x1}^{x2} Phi((x - c)/s) dx, s > 0, in closed form.
inline double integral_norm_cdf_rising(double x1, double x2, double c, double s) {
    const double u1 = (x1 - c) / s, u2 = (x2 - c) / s;
    return s * (norm_cdf_antideriv(u2) - norm_cdf_antideriv(u1));
}

// 5-point Gauss-Legendre on [a,b].
template <class F>
double gauss5(const F& f, double a, double b) {
    static constexpr double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
    static constexpr double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
    const double m = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += ws[i] * f(m + h * xs[i]);
    return s * h;
}

namespace detail {
template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth, int force_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || (force_depth <= 0 && std::abs(delta) <= 15.0 * tol))
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                                force_depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                                force_depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a,b] with absolute tolerance. The first few levels are
// always subdivided, so symmetric integrands whose coarse samples happen to
// vanish are not mistaken for zero.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, 4);
}

// Bisection for a continuous function with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(const F& f, double lo, double hi, double ftol = 1e-11, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw std::invalid_argument("bisect: no sign change in bracket");
    for (int i = 0; i < max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= ftol || 0.5 * (hi - lo) < 1e-15 * (1.0 + std::abs(mid))) return mid;
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Expand a bracket geometrically around [lo, hi] until f changes sign.
template <class F>
std::pair<double, double> expand_bracket(const F& f, double lo, double hi, int max_expand = 60) {
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < max_expand && flo * fhi > 0.0; ++i) {
        const double w = hi - lo;
        if (std::abs(flo) < std::abs(fhi)) {
            lo -= w;
            flo = f(lo);
        } else {
            hi += w;
            fhi = f(hi);
        }
    }
    if (flo * fhi > 0.0) throw std::runtime_error("expand_bracket: no sign change found");
    return {lo, hi};
}

// Golden-section minimization of a unimodal function on [a,b].
template <class F>
double golden_min(const F& f, double a, double b, double xtol = 1e-10) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (std::abs(b - a) > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// FNV-1a over a byte string; used for config hashes in CSV headers.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ssep
