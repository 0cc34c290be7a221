// varprob.hpp -- the quadratic space-time variational problem behind the
// small-deviation curvature, and the deterministic dynamical variances.
//
// Spectral side: the boundary spectrum of the minimizer is c/K(y) with
//   k(y) = (y^2/4) coth(y^2/2),   K(y) = (y^2/2) e^{y^2/2}/(e^{y^2/2}-e^{-y^2/2}),
// int 1/K = 4 sqrt(pi) and the minimum value 2*pi / int 1/K = sqrt(pi)/2.
//
// Real-space side: the inverse Fourier integral of the minimizer spectrum
// evaluates in closed form,
//   M(t,x)  = F(w2,x) - F(w1,x),  w1 = sqrt((1-t)/2), w2 = sqrt((1+t)/2),
//   F(w,x)  = w exp(-x^2/(4w^2)) + (|x| sqrt(pi)/2) erf(|x|/(2w)),
// which the grid evaluation of the functional integrates numerically.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssep/grid.hpp"
#include "ssep/math_util.hpp"

namespace ssep {

// k(y) = (y^2/4)(e^u + e^-u)/(e^u - e^-u), u = y^2/2; overflow-safe.
inline double k_kernel(double y) {
    const double v = y * y;
    if (v < 1e-8) return 0.5 + v * v / 24.0;
    const double em = std::exp(-v);
    return 0.25 * v * (1.0 + em) / (1.0 - em);
}

// K(y) = (y^2/2) e^u/(e^u - e^-u) = (y^2/2)/(1 - e^{-y^2}); K - k = y^2/4.
inline double K_kernel(double y) {
    const double v = y * y;
    if (v < 1e-8) return 0.5 * (1.0 + 0.5 * v);
    return 0.5 * v / (-std::expm1(-v));
}

inline double K_kernel_inv(double y) {
    const double v = y * y;
    if (v < 1e-8) return 2.0 * (1.0 - 0.5 * v + v * v / 6.0);
    return 2.0 * (-std::expm1(-v)) / v;
}

struct SpectralSolution {
    std::vector<double> y_grid;
    std::vector<double> Mhat1;    // boundary spectrum c / K(y)
    double c = 0.0;               // sqrt(2*pi) / int K^{-1}
    double int_K_inv = 0.0;       // quadrature of int 1/K dy (= 4 sqrt(pi))
    double value = 0.0;           // 2*pi / int_K_inv (= sqrt(pi)/2)
};

// int_R K^{-1} dy via the substitution integrand 2(1-e^{-y^2})/y^2: adaptive
// quadrature on [0, Y] plus the exact remainder
//   int_Y^inf (1-e^{-y^2})/y^2 dy = 1/Y - e^{-Y^2}/Y + sqrt(pi) erfc(Y).
inline SpectralSolution inf_M(int report_points = 512) {
    const double Y = 12.0;
    const double head = adaptive_simpson([](double y) { return K_kernel_inv(y); }, 0.0, Y, 1e-13);
    const double tail = 2.0 * (1.0 / Y - std::exp(-Y * Y) / Y + kSqrtPi * std::erfc(Y));
    SpectralSolution s;
    s.int_K_inv = 2.0 * (head + tail);  // even integrand
    s.value = 2.0 * kPi / s.int_K_inv;
    s.c = std::sqrt(2.0 * kPi) / s.int_K_inv;
    s.y_grid.resize(report_points);
    s.Mhat1.resize(report_points);
    for (int i = 0; i < report_points; ++i) {
        const double y = -Y + 2.0 * Y * i / (report_points - 1);
        s.y_grid[i] = y;
        s.Mhat1[i] = s.c * K_kernel_inv(y);
    }
    return s;
}

namespace minimizer {

inline double w_lo(double t) { return std::sqrt(0.5 * (1.0 - t)); }
inline double w_hi(double t) { return std::sqrt(0.5 * (1.0 + t)); }

inline double F_part(double w, double x) {
    const double ax = std::abs(x);
    if (w <= 0.0) return 0.5 * kSqrtPi * ax;  // limit w -> 0+
    return w * std::exp(-x * x / (4.0 * w * w)) + 0.5 * ax * kSqrtPi * std::erf(ax / (2.0 * w));
}

inline double M(double t, double x) { return F_part(w_hi(t), x) - F_part(w_lo(t), x); }

inline double gauss_lobe(double w, double x) {  // (1/(2w)) exp(-x^2/(4w^2))
    if (w <= 0.0) return 0.0;
    return 0.5 / w * std::exp(-x * x / (4.0 * w * w));
}

inline double M_x(double t, double x) {
    const double w1 = w_lo(t), w2 = w_hi(t);
    const double e2 = std::erf(x / (2.0 * w2));
    const double e1 = w1 > 0.0 ? std::erf(x / (2.0 * w1)) : (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
    return 0.5 * kSqrtPi * (e2 - e1);
}

inline double M_t(double t, double x) {
    return 0.5 * (gauss_lobe(w_hi(t), x) + gauss_lobe(w_lo(t), x));
}

inline double M_xx(double t, double x) {
    return gauss_lobe(w_hi(t), x) - gauss_lobe(w_lo(t), x);
}

}  // namespace minimizer

struct MinimizerField {
    SpaceTimeGrid grid;
    Array2 M;            // (nt+1) x nx node samples
    double value = 0.0;  // grid evaluation of the functional
};

namespace detail {
// Trapezoid of f over the grid's x nodes, with an adaptive repair of the
// central cells when the integrand has structure narrower than the spacing
// (the slice at t -> 1 concentrates on scale w ~ sqrt(1-t)). The repair
// swaps the trapezoid between the nodes bracketing [-c, c] for an adaptive
// quadrature over exactly that span, so it is independent of grid parity.
template <class F>
double slice_integral(const SpaceTimeGrid& g, const F& f, double narrow_scale) {
    const double dx = g.dx();
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i)
        total += f(g.x(i)) * ((i == 0 || i == g.nx - 1) ? 0.5 : 1.0);
    total *= dx;
    if (narrow_scale > 0.0 && narrow_scale < 4.0 * dx) {
        const double c = std::max(8.0 * dx, 6.0 * narrow_scale);
        int il = static_cast<int>(std::floor((-c + g.L) / dx));
        int ir = static_cast<int>(std::ceil((c + g.L) / dx));
        il = std::max(il, 0);
        ir = std::min(ir, g.nx - 1);
        if (ir - il >= 2) {
            double coarse = 0.0;
            for (int i = il; i <= ir; ++i)
                coarse += f(g.x(i)) * ((i == il || i == ir) ? 0.5 : 1.0);
            coarse *= dx;
            const double fine = adaptive_simpson(f, g.x(il), g.x(ir), 1e-11);
            total += fine - coarse;
        }
    }
    return total;
}
}  // namespace detail

// Samples the minimizer on the grid and evaluates
//   M = (1/4) int M_x(1,.)^2 + (1/2) iint M_t^2 + (1/8) iint M_xx^2
// by quadrature: trapezoid in x (with central repair near t = 1) and a
// time mesh graded as 1 - t = (1-u)^2 against the integrable (1-t)^{-1/2}
// endpoint singularity of the volume terms.
inline MinimizerField reconstruct_minimizer(const SpaceTimeGrid& g) {
    g.validate();
    if (std::abs(g.T - 1.0) > 1e-12)
        throw std::invalid_argument("reconstruct_minimizer: functional is posed on t in [0,1]");
    if (g.L < 8.0) throw std::invalid_argument("reconstruct_minimizer: need L >= 8");

    MinimizerField out;
    out.grid = g;
    out.M = Array2(g.nt + 1, g.nx);
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.nx; ++i) out.M(k, i) = minimizer::M(g.t_node(k), g.x(i));

    double value =
        0.25 * detail::slice_integral(
                   g, [](double x) { const double d = minimizer::M_x(1.0, x); return d * d; },
                   0.0);

    // volume terms on the graded mesh, 2-point Gauss per u-panel
    const double gp = 0.5 / std::sqrt(3.0);
    for (int j = 0; j < g.nt; ++j) {
        const double u0 = static_cast<double>(j) / g.nt, u1 = static_cast<double>(j + 1) / g.nt;
        const double um = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
        for (double uq : {um - 2.0 * half * gp, um + 2.0 * half * gp}) {
            const double t = 1.0 - (1.0 - uq) * (1.0 - uq);
            const double jac = 2.0 * (1.0 - uq);           // dt/du
            const double wq = half * jac;                  // panel Gauss weight * jacobian
            const double narrow = 2.0 * minimizer::w_lo(t);
            const double mt2 = detail::slice_integral(
                g, [t](double x) { const double d = minimizer::M_t(t, x); return d * d; }, narrow);
            const double mxx2 = detail::slice_integral(
                g, [t](double x) { const double d = minimizer::M_xx(t, x); return d * d; }, narrow);
            value += wq * (0.5 * mt2 + 0.125 * mxx2);
        }
    }
    out.value = value;
    return out;
}

// --- continuous-time rate-1 simple random walk kernel ---------------------

struct WalkKernel {
    int range = 0;                     // sites -range .. range
    std::vector<double> t_grid;        // snapshot times (ascending, > 0)
    std::vector<std::vector<double>> p_snapshots;         // p(t, .) rows
    std::vector<std::vector<double>> integral_snapshots;  // int_0^t p(s,.) ds rows
    double mass_error = 0.0;           // max |1 - sum_j p| over snapshots

    double p(std::size_t snap, int j) const {
        return p_snapshots.at(snap)[static_cast<std::size_t>(j + range)];
    }
    double time_integral(std::size_t snap, int j) const {
        return integral_snapshots.at(snap)[static_cast<std::size_t>(j + range)];
    }
};

// Master equation dp/dt(j) = (1/2) p(j-1) + (1/2) p(j+1) - p(j) integrated
// with RK4 on the truncated lattice, together with the running time
// integrals. Snapshot times need not be multiples of the step.
inline WalkKernel walk_kernel(double t_max, int range, std::vector<double> t_grid = {},
                              double dt_hint = 0.1) {
    if (range < static_cast<int>(std::ceil(6.0 * std::sqrt(t_max))))
        throw std::invalid_argument("walk_kernel: range below 6*sqrt(t_max)");
    if (t_grid.empty()) t_grid = {t_max};
    for (double t : t_grid)
        if (t <= 0.0 || t > t_max) throw std::invalid_argument("walk_kernel: snapshot time");

    const std::size_t n = static_cast<std::size_t>(2 * range + 1);
    std::vector<double> p(n, 0.0), I(n, 0.0);
    p[static_cast<std::size_t>(range)] = 1.0;

    auto L = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = -v[j];
            if (j > 0) acc += 0.5 * v[j - 1];
            if (j + 1 < n) acc += 0.5 * v[j + 1];
            out[j] = acc;
        }
    };

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    std::vector<double> q1(n), q2(n), q3(n), q4(n);
    auto rk4_step = [&](double dt) {
        L(p, k1);
        for (std::size_t j = 0; j < n; ++j) { q1[j] = p[j]; tmp[j] = p[j] + 0.5 * dt * k1[j]; }
        L(tmp, k2);
        for (std::size_t j = 0; j < n; ++j) { q2[j] = tmp[j]; tmp[j] = p[j] + 0.5 * dt * k2[j]; }
        L(tmp, k3);
        for (std::size_t j = 0; j < n; ++j) { q3[j] = tmp[j]; tmp[j] = p[j] + dt * k3[j]; }
        L(tmp, k4);
        for (std::size_t j = 0; j < n; ++j) {
            q4[j] = tmp[j];
            p[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            I[j] += dt / 6.0 * (q1[j] + 2.0 * q2[j] + 2.0 * q3[j] + q4[j]);
        }
    };

    WalkKernel out;
    out.range = range;
    std::sort(t_grid.begin(), t_grid.end());
    out.t_grid = t_grid;

    double t = 0.0;
    for (double target : t_grid) {
        const double span = target - t;
        if (span > 0.0) {
            const int steps = std::max(1, static_cast<int>(std::ceil(span / dt_hint)));
            const double dt = span / steps;
            for (int s = 0; s < steps; ++s) rk4_step(dt);
            t = target;
        }
        out.p_snapshots.push_back(p);
        out.integral_snapshots.push_back(I);
        double mass = 0.0;
        for (double v : p) mass += v;
        out.mass_error = std::max(out.mass_error, std::abs(1.0 - mass));
    }
    return out;
}

struct DynVariance {
    double Q0_over_sqrtT = 0.0;
    double limit = 0.0;  // (sqrt(2)-1) rho (1-rho) / sqrt(pi)
};

// Q0(T) = rho(1-rho) sum_i | (1/2) int_0^T p(t,i+1) - p(t,i) dt |^2.
inline DynVariance dyn_variance_current(double T, double rho, const WalkKernel* precomputed = nullptr,
                                        std::size_t snap = 0) {
    if (!(T > 0.0)) throw std::invalid_argument("dyn_variance_current: need T > 0");
    DynVariance out;
    out.limit = (kSqrt2 - 1.0) * rho * (1.0 - rho) / kSqrtPi;
    if (rho <= 0.0 || rho >= 1.0) {
        out.Q0_over_sqrtT = 0.0;
        return out;
    }
    WalkKernel local;
    const WalkKernel* wk = precomputed;
    if (!wk) {
        const int range = static_cast<int>(std::ceil(6.0 * std::sqrt(T))) + 8;
        local = walk_kernel(T, range, {T});
        wk = &local;
        snap = 0;
    }
    double sum = 0.0;
    for (int i = -wk->range; i < wk->range; ++i) {
        const double d = 0.5 * (wk->time_integral(snap, i + 1) - wk->time_integral(snap, i));
        sum += d * d;
    }
    out.Q0_over_sqrtT = rho * (1.0 - rho) * sum / std::sqrt(T);
    return out;
}

struct VarianceTargets {
    double sigma2_J = 0.0;      // sqrt(2/pi) rho(1-rho)
    double sigma2_X = 0.0;      // sqrt(2/pi) (1-rho)/rho
    double sigma2_J_dyn = 0.0;  // rho(1-rho)/sqrt(pi)
    double sigma2_X_dyn = 0.0;  // (1-rho)/(rho sqrt(pi))
    double static_J = 0.0;      // (sqrt(2)-1) rho(1-rho)/sqrt(pi)
};

inline VarianceTargets variance_targets(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("variance_targets: need 0 < rho < 1");
    VarianceTargets v;
    const double q = rho * (1.0 - rho);
    v.sigma2_J = std::sqrt(2.0 / kPi) * q;
    v.sigma2_X = std::sqrt(2.0 / kPi) * (1.0 - rho) / rho;
    v.sigma2_J_dyn = q / kSqrtPi;
    v.sigma2_X_dyn = (1.0 - rho) / (rho * kSqrtPi);
    v.static_J = (kSqrt2 - 1.0) * q / kSqrtPi;
    return v;
}

// Optional cross-check of the closing double integral:
//   (sqrt(2)/(8 sqrt(pi T))) iint_{[eps T, T]^2} (t+s)^{-3/2} ds dt,
// by direct double quadrature.
inline double q2_crosscheck(double T, double eps) {
    auto inner = [&](double t) {
        return adaptive_simpson([&](double s) { return std::pow(t + s, -1.5); }, eps * T, T, 1e-12);
    };
    const double outer = adaptive_simpson(inner, eps * T, T, 1e-10);
    return kSqrt2 / (8.0 * std::sqrt(kPi * T)) * outer;
}

}  // namespace ssep
