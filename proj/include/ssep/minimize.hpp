// minimize.hpp -- constrained minimization of the dynamical rate
//   I_0 = (1/2) iint h^2 mu(1-mu)   (+ initial relative entropy for LEM starts)
// over drift fields h (and the initial density for LEM), subject to a scalar
// current / tagged-position constraint, by an augmented Lagrangian with
// L-BFGS inner solves. Gradients come from the exact discrete adjoint of the
// forward scheme, so they match finite differences to rounding.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ssep/field.hpp"
#include "ssep/forward.hpp"
#include "ssep/grid.hpp"
#include "ssep/hydro.hpp"
#include "ssep/profile.hpp"
#include "ssep/ratecurve.hpp"
#include "ssep/trialbounds.hpp"

namespace ssep {

enum class InitKind { dic, lem };

struct MinimizeOptions {
    int max_outer = 12;
    int max_inner = 200;
    double grad_tol = 1e-7;        // scaled by the objective magnitude
    double eps_c_factor = 1e-4;    // feasibility: |c| <= eps_c_factor * max(1,|a|)
    double penalty0 = 4.0;
    int lbfgs_memory = 8;
    double init_eta = 0.0;         // multiplier warm start (0 = automatic)
    const Array2* warm_start_h = nullptr;  // overrides the trial-field initialization
};

struct RateResult {
    double value = 0.0;           // I_0 (+ entropy for LEM) at the returned fields
    double feasibility = 0.0;     // |c|
    int iterations = 0;           // total inner iterations
    bool converged = false;
    FieldTriple field;
    std::vector<double> mu0;      // optimized initial density (LEM) or profile samples
};

namespace opt_detail {

// Entropy with the density clip inside the logs; smooth in mu0.
inline double entropy_clipped(double a, double b) {
    const double ac = clip01(a), bc = clip01(b);
    return ac * std::log(ac / bc) + (1.0 - ac) * std::log((1.0 - ac) / (1.0 - bc));
}
inline double entropy_clipped_da(double a, double b) {
    const double ac = clip01(a), bc = clip01(b);
    return std::log(ac / (1.0 - ac)) - std::log(bc / (1.0 - bc));
}

// Trapezoid coefficients for int_0^a mu(x) dx of the piecewise-linear
// interpolant on the grid (signed for a < 0).
inline std::vector<double> terminal_mass_coeffs(const SpaceTimeGrid& g, double a) {
    std::vector<double> c(static_cast<std::size_t>(g.nx), 0.0);
    const double lo = std::min(0.0, a), hi = std::max(0.0, a);
    const double sign = a >= 0.0 ? 1.0 : -1.0;
    const double dx = g.dx();
    for (int i = 0; i + 1 < g.nx; ++i) {
        const double xl = g.x(i), xr = g.x(i + 1);
        const double s = std::max(lo, xl), e = std::min(hi, xr);
        if (s >= e) continue;
        // integral of the linear interpolant over [s, e]
        const double us = (s - xl) / dx, ue = (e - xl) / dx;  // in [0,1]
        const double len = e - s;
        const double mean_u = 0.5 * (us + ue);
        c[static_cast<std::size_t>(i)] += sign * len * (1.0 - mean_u);
        c[static_cast<std::size_t>(i) + 1] += sign * len * mean_u;
    }
    return c;
}

struct Objective {
    const SpaceTimeGrid* g = nullptr;
    double bc_l = 0.0, bc_r = 0.0;
    bool lem = false;
    std::vector<double> gamma_nodes;       // profile samples (DIC initial data / LEM reference)
    std::vector<double> terminal_coeffs;   // tagged constraint only
    bool tagged = false;
    double a_target = 0.0;
    // augmented Lagrangian state
    double eta = 0.0;
    double penalty = 1.0;

    int nh() const { return g->nt * g->faces(); }
    int nvar() const { return nh() + (lem ? g->nx - 2 : 0); }

    void unpack(const std::vector<double>& z, Array2& h, std::vector<double>& mu0) const {
        h = Array2(g->nt, g->faces());
        std::copy(z.begin(), z.begin() + nh(), h.v.begin());
        mu0 = gamma_nodes;
        if (lem) {
            for (int i = 1; i <= g->nx - 2; ++i) {
                const double th = z[static_cast<std::size_t>(nh() + i - 1)];
                mu0[static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(-th));
            }
        }
    }

    double constraint(const FieldTriple& f) const {
        double c = integrated_current(f, 0.0) - (tagged ? 0.0 : a_target);
        if (tagged) {
            const double* mT = f.mu.row(g->nt);
            double mass = 0.0;
            for (int i = 0; i < g->nx; ++i) mass += terminal_coeffs[static_cast<std::size_t>(i)] * mT[i];
            c -= mass;
        }
        return c;
    }

    double rate_value(const FieldTriple& f, const std::vector<double>& mu0) const {
        double v = i0_evaluate(f);
        if (lem) {
            for (int i = 0; i < g->nx; ++i) {
                const double w = (i == 0 || i == g->nx - 1) ? 0.5 : 1.0;
                v += w * g->dx() *
                     entropy_clipped(mu0[static_cast<std::size_t>(i)],
                                     gamma_nodes[static_cast<std::size_t>(i)]);
            }
        }
        return v;
    }

    // Augmented objective and its gradient; returns +inf on solver blow-up.
    double eval(const std::vector<double>& z, std::vector<double>* grad,
                double* rate_out = nullptr, double* c_out = nullptr) const {
        Array2 h;
        std::vector<double> mu0;
        unpack(z, h, mu0);
        FieldTriple f;
        try {
            f = solve_forward(h, mu0, *g, bc_l, bc_r);
        } catch (const SolverError&) {
            return std::numeric_limits<double>::infinity();
        }
        const double c = constraint(f);
        const double rate = rate_value(f, mu0);
        const double value = rate + eta * c + 0.5 * penalty * c * c;
        if (rate_out) *rate_out = rate;
        if (c_out) *c_out = c;
        if (grad) adjoint_gradient(f, mu0, c, *grad);
        return value;
    }

    // Exact reverse sweep of: CN diffusion + explicit upwind drift forward map,
    // the face/midpoint I_0 quadrature, the flux-based constraint, and the
    // entropy term.
    void adjoint_gradient(const FieldTriple& f, const std::vector<double>& mu0,
                          double c, std::vector<double>& grad) const {
        const int nx = g->nx, nt = g->nt, nf = g->faces();
        const double dx = g->dx(), dt = g->dt();
        const double beta = dt / (4.0 * dx * dx);
        const double w_i0 = 0.5 * dx * dt;
        const double pprime = eta + penalty * c;  // dPhi/dc

        grad.assign(static_cast<std::size_t>(nvar()), 0.0);
        auto gh = [&](int k, int q) -> double& {
            return grad[static_cast<std::size_t>(k) * nf + q];
        };

        // constraint flux weights: c touches j(k, f0) and j(k, f0 + 1)
        const double upos = (0.0 - g->xf(0)) / dx;
        int f0 = static_cast<int>(std::floor(upos));
        f0 = std::max(0, std::min(f0, nf - 2));
        const double wgt = std::min(1.0, std::max(0.0, upos - f0));

        // direct partials dPhi/dmu accumulated per time level
        Array2 G(nt + 1, nx);
        for (int k = 0; k < nt; ++k) {
            const double* m = f.mu.row(k);
            for (int q = 0; q < nf; ++q) {
                const double hv = f.h(k, q);
                const double mt_raw = f.mu_face(k, q);
                const double mt = clip01(mt_raw);
                // I_0 term (the clip gate zeroes the density sensitivity)
                const double gate = mt_raw == mt ? 1.0 : 0.0;
                const double dI_dmu = gate * w_i0 * hv * hv * (1.0 - 2.0 * mt) * 0.25;
                G(k, q) += dI_dmu;
                G(k, q + 1) += dI_dmu;
                G(k + 1, q) += dI_dmu;
                G(k + 1, q + 1) += dI_dmu;
                gh(k, q) += 2.0 * w_i0 * hv * mt * (1.0 - mt);
                // constraint via j(k, q) = -(d mubar)/(2dx) + D
                double cw = 0.0;
                if (q == f0) cw = (1.0 - wgt) * dt;
                if (q == f0 + 1) cw = wgt * dt;
                if (cw != 0.0) {
                    const double s = pprime * cw;
                    const double dj = s / (4.0 * dx);
                    G(k, q) += dj;
                    G(k + 1, q) += dj;
                    G(k, q + 1) -= dj;
                    G(k + 1, q + 1) -= dj;
                    gh(k, q) += s * drift_flux_dh(hv, m[q], m[q + 1]);
                    G(k, q) += s * drift_flux_da(hv, m[q], m[q + 1]);
                    G(k, q + 1) += s * drift_flux_db(hv, m[q], m[q + 1]);
                }
            }
        }
        if (tagged) {
            for (int i = 0; i < nx; ++i)
                G(nt, i) -= pprime * terminal_coeffs[static_cast<std::size_t>(i)];
        }

        // reverse time sweep; lambda and nu live on interior nodes
        const CnFactorization cn(nx - 2, beta);
        std::vector<double> lambda(static_cast<std::size_t>(nx), 0.0);
        for (int i = 1; i <= nx - 2; ++i) lambda[static_cast<std::size_t>(i)] = G(nt, i);
        std::vector<double> nu(static_cast<std::size_t>(nx), 0.0);
        std::vector<double> next(static_cast<std::size_t>(nx), 0.0);

        for (int k = nt - 1; k >= 0; --k) {
            for (int i = 1; i <= nx - 2; ++i) nu[static_cast<std::size_t>(i)] =
                lambda[static_cast<std::size_t>(i)];
            cn.solve(nu.data() + 1);
            nu[0] = nu[static_cast<std::size_t>(nx - 1)] = 0.0;

            const double* m = f.mu.row(k);
            std::fill(next.begin(), next.end(), 0.0);
            // (I + beta L)^T nu
            for (int i = 1; i <= nx - 2; ++i) {
                next[static_cast<std::size_t>(i)] =
                    G(k, i) + nu[static_cast<std::size_t>(i)] +
                    beta * (nu[static_cast<std::size_t>(i - 1)] -
                            2.0 * nu[static_cast<std::size_t>(i)] +
                            nu[static_cast<std::size_t>(i + 1)]);
            }
            // drift transpose: dS/dD[q] = (dt/dx)(nu[q+1] - nu[q])
            for (int q = 0; q < nf; ++q) {
                const double dSdD = (dt / dx) * (nu[static_cast<std::size_t>(q + 1)] -
                                                 nu[static_cast<std::size_t>(q)]);
                if (dSdD == 0.0) continue;
                const double hv = f.h(k, q);
                gh(k, q) += dSdD * drift_flux_dh(hv, m[q], m[q + 1]);
                if (q >= 1 && q <= nx - 2)
                    next[static_cast<std::size_t>(q)] += dSdD * drift_flux_da(hv, m[q], m[q + 1]);
                if (q + 1 >= 1 && q + 1 <= nx - 2)
                    next[static_cast<std::size_t>(q + 1)] +=
                        dSdD * drift_flux_db(hv, m[q], m[q + 1]);
            }
            lambda.swap(next);
        }
        // boundary entries of level 0 are pinned
        for (int i = 0; i < nx; ++i)
            if (i == 0 || i == nx - 1) lambda[static_cast<std::size_t>(i)] = 0.0;

        if (lem) {
            for (int i = 1; i <= nx - 2; ++i) {
                const double m0 = mu0[static_cast<std::size_t>(i)];
                const double dent =
                    g->dx() * entropy_clipped_da(m0, gamma_nodes[static_cast<std::size_t>(i)]);
                const double total = lambda[static_cast<std::size_t>(i)] + dent;
                grad[static_cast<std::size_t>(nh() + i - 1)] = total * m0 * (1.0 - m0);
            }
        }
    }
};

// Convex presolve in height-function variables. With
//   U(t,x) = int_{-L}^x [mu(t,y) - gamma(y)] dy,   U(0,.) = 0,
// the fields are mu = gamma + d_x U and j = -d_t U (conservation is then an
// identity), the rate (1/2) iint (j + (1/2) d_x mu)^2 / (mu(1-mu)) is jointly
// convex in U, and both constraints are linear:
//   current:  -U(T, 0) = a - v-part          (int_0^T J(0,t) dt = a)
//   tagged:    U(T, a) = -int_0^a gamma      (current across a = initial mass)
// An L-BFGS/augmented-Lagrangian solve here cannot stall on saturation walls,
// and its optimum converts to a drift field that warm-starts the h-space
// machinery.
// Staggered layout: U lives on nodes (zero at t = 0, at both ends, and at the
// domain boundary), densities mu = gamma + (U_{i+1} - U_i)/dx live on faces,
// and the flux residual e = -d_t U + (1/2) d_x mu is charged at interior
// nodes and time midpoints. Compact stencils leave no grid-scale null modes
// for fronts to hide in.
struct UPresolve {
    const SpaceTimeGrid* g = nullptr;  // coarse grid (no CFL constraint applies)
    std::vector<double> gamma_faces;
    double constraint_x = 0.0;   // evaluate U(T, .) here
    double constraint_rhs = 0.0; // target value of -U(T,x0) (current) / U(T,a) (tagged)
    bool tagged = false;
    double eta = 0.0, penalty = 1.0;
    // densities are kept inside [band, 1-band] by a smooth quadratic penalty,
    // and 1/q is floored consistently at q(band); the h-space polish that
    // follows re-evaluates the exact objective. The barrier weight is per
    // face, not per cell volume, so spikes cannot pay for themselves.
    double band = 0.02;
    double barrier_weight = 1.0;  // set by the driver to ~50 max(1, a^2)/(dx dt)

    int nvar() const { return g->nt * (g->nx - 2); }
    double Uat(const std::vector<double>& U, int k, int i) const {
        if (k == 0 || i <= 0 || i >= g->nx - 1) return 0.0;
        return U[static_cast<std::size_t>(k - 1) * (g->nx - 2) + (i - 1)];
    }

    double mu_face(const std::vector<double>& U, int k, int f) const {
        return gamma_faces[static_cast<std::size_t>(f)] +
               (Uat(U, k, f + 1) - Uat(U, k, f)) / g->dx();
    }

    // U(T, .) averaged over a small node window around constraint_x; the
    // smearing spreads the multiplier's point pull across several cells.
    static constexpr int kCwin = 2;
    double constraint(const std::vector<double>& U) const {
        const double u = (constraint_x - g->x(0)) / g->dx();
        const int ic = std::max(1 + kCwin,
                                std::min(static_cast<int>(std::llround(u)), g->nx - 2 - kCwin));
        double UT = 0.0;
        for (int i = ic - kCwin; i <= ic + kCwin; ++i) UT += Uat(U, g->nt, i);
        UT /= (2 * kCwin + 1);
        return (tagged ? UT : -UT) - constraint_rhs;
    }

    double eval(const std::vector<double>& U, std::vector<double>* grad) const {
        const int nx = g->nx, nt = g->nt;
        const double dx = g->dx(), dt = g->dt();
        const double w = 0.5 * dx * dt;
        if (grad) grad->assign(U.size(), 0.0);
        double F = 0.0;
        for (int k = 0; k < nt; ++k) {
            for (int i = 1; i <= nx - 2; ++i) {
                // faces i-1 (left of node i) and i (right), both time levels.
                // 1/q is averaged over the four faces (not q of the average),
                // so transport through out-of-range densities is charged at
                // every face; each e^2/q(m) term is jointly convex.
                const double m[4] = {mu_face(U, k, i - 1), mu_face(U, k, i),
                                     mu_face(U, k + 1, i - 1), mu_face(U, k + 1, i)};
                double S = 0.0, qc[4], inband[4];
                double bar = 0.0, dbar[4];
                for (int n = 0; n < 4; ++n) {
                    const double lo = band, hi = 1.0 - band;
                    const double mb = std::max(lo, std::min(hi, m[n]));
                    inband[n] = (mb == m[n]) ? 1.0 : 0.0;
                    qc[n] = mb * (1.0 - mb);
                    S += 0.25 / qc[n];
                    const double viol = m[n] - mb;
                    bar += barrier_weight * viol * viol;
                    dbar[n] = 2.0 * barrier_weight * viol;
                }
                const double jv = -(Uat(U, k + 1, i) - Uat(U, k, i)) / dt;
                const double mx = 0.5 * ((m[1] - m[0]) + (m[3] - m[2])) / dx;
                const double e = jv + 0.5 * mx;
                F += w * (e * e * S + bar);
                if (!grad) continue;
                const double de = 2.0 * w * e * S;
                auto add = [&](int k2, int i2, double v) {
                    if (k2 >= 1 && i2 >= 1 && i2 <= nx - 2)
                        (*grad)[static_cast<std::size_t>(k2 - 1) * (nx - 2) + (i2 - 1)] += v;
                };
                add(k + 1, i, -de / dt);
                add(k, i, de / dt);
                // mu_face(k2, f) = gamma_f + (U(k2,f+1) - U(k2,f))/dx
                auto add_mu = [&](int k2, int f, double v) {
                    add(k2, f + 1, v / dx);
                    add(k2, f, -v / dx);
                };
                const double dmx = de * 0.5 * 0.5 / dx;  // d e / d mu: +-1/(2dx) per face
                auto dmu_n = [&](int n) {
                    const double dS = inband[n] == 0.0
                                          ? 0.0
                                          : -e * e * 0.25 * (1.0 - 2.0 * m[n]) / (qc[n] * qc[n]);
                    return w * (dS + dbar[n]);
                };
                add_mu(k, i - 1, -dmx + dmu_n(0));
                add_mu(k, i, dmx + dmu_n(1));
                add_mu(k + 1, i - 1, -dmx + dmu_n(2));
                add_mu(k + 1, i, dmx + dmu_n(3));
            }
        }
        const double c = constraint(U);
        F += eta * c + 0.5 * penalty * c * c;
        if (grad) {
            const double pprime = eta + penalty * c;
            const double u = (constraint_x - g->x(0)) / g->dx();
            const int ic = std::max(1 + kCwin,
                                    std::min(static_cast<int>(std::llround(u)), nx - 2 - kCwin));
            const double sgn = (tagged ? 1.0 : -1.0) / (2 * kCwin + 1);
            for (int i = ic - kCwin; i <= ic + kCwin; ++i)
                if (i >= 1 && i <= nx - 2)
                    (*grad)[static_cast<std::size_t>(nt - 1) * (nx - 2) + (i - 1)] +=
                        pprime * sgn;
        }
        return F;
    }
};

// Plain L-BFGS with Armijo backtracking; fn(z, grad) returns the value.
inline int lbfgs_minimize(std::vector<double>& z,
                          const std::function<double(const std::vector<double>&,
                                                     std::vector<double>*)>& fn,
                          int max_iter, double grad_tol, int memory) {
    const std::size_t n = z.size();
    std::vector<double> grad(n), grad_new(n), d(n), z_new(n);
    std::vector<std::vector<double>> S, Y;
    std::vector<double> rho_mem;
    double fz = fn(z, &grad);
    if (!std::isfinite(fz)) return 0;
    int iters = 0;
    for (; iters < max_iter; ++iters) {
        double gnorm = 0.0;
        for (double gi : grad) gnorm = std::max(gnorm, std::abs(gi));
        if (gnorm <= grad_tol * std::max(1.0, std::abs(fz))) break;

        // two-loop recursion
        d = grad;
        std::vector<double> alpha(S.size());
        for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
            double sd = 0.0;
            for (std::size_t j = 0; j < n; ++j) sd += S[i][j] * d[j];
            alpha[i] = rho_mem[i] * sd;
            for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * Y[i][j];
        }
        if (!S.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& s = S.back();
            const auto& y = Y.back();
            for (std::size_t j = 0; j < n; ++j) {
                sy += s[j] * y[j];
                yy += y[j] * y[j];
            }
            const double scale = sy / yy;
            for (auto& v : d) v *= scale;
        }
        for (std::size_t i = 0; i < S.size(); ++i) {
            double yd = 0.0;
            for (std::size_t j = 0; j < n; ++j) yd += Y[i][j] * d[j];
            const double b = rho_mem[i] * yd;
            for (std::size_t j = 0; j < n; ++j) d[j] += (alpha[i] - b) * S[i][j];
        }
        for (auto& v : d) v = -v;

        double gd = 0.0;
        for (std::size_t j = 0; j < n; ++j) gd += grad[j] * d[j];
        if (gd >= 0.0) {  // stale curvature; restart from steepest descent
            S.clear();
            Y.clear();
            rho_mem.clear();
            gd = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                d[j] = -grad[j];
                gd -= grad[j] * grad[j];
            }
        }

        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t j = 0; j < n; ++j) z_new[j] = z[j] + step * d[j];
            f_new = fn(z_new, &grad_new);
            if (f_new <= fz + 1e-4 * step * gd) break;
            step *= 0.5;
        }
        if (!std::isfinite(f_new) || f_new > fz) break;  // line search failed

        std::vector<double> s(n), y(n);
        double sy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = z_new[j] - z[j];
            y[j] = grad_new[j] - grad[j];
            sy += s[j] * y[j];
        }
        if (sy > 1e-12) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            rho_mem.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > memory) {
                S.erase(S.begin());
                Y.erase(Y.begin());
                rho_mem.erase(rho_mem.begin());
            }
        }
        z.swap(z_new);
        grad.swap(grad_new);
        const double df = fz - f_new;
        fz = f_new;
        if (df <= 1e-14 * (std::abs(fz) + 1e-14) && iters > 4) { ++iters; break; }
    }
    return iters;
}

inline std::vector<double> sample_profile_faces(const SpaceTimeGrid& g, const Profile& p) {
    std::vector<double> v(static_cast<std::size_t>(g.faces()));
    for (int f = 0; f < g.faces(); ++f) v[static_cast<std::size_t>(f)] = p(g.xf(f));
    return v;
}

inline void presolve_al_loop(UPresolve& up, std::vector<double>& U, double a, int max_inner,
                             int rounds) {
    auto fn = [&up](const std::vector<double>& z, std::vector<double>* grad) {
        return up.eval(z, grad);
    };
    double c_prev = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < rounds; ++outer) {
        lbfgs_minimize(U, fn, max_inner, 1e-9, 16);
        const double c = up.constraint(U);
        if (std::abs(c) <= 1e-5 * std::max(1.0, std::abs(a)) && outer > 0) break;
        up.eta += up.penalty * c;
        if (std::abs(c) > 0.25 * c_prev) up.penalty *= 4.0;
        c_prev = std::abs(c);
    }
}

struct PresolveResult {
    Array2 h;
    double value = 0.0;  // banded objective at the presolve optimum
};

// Runs the convex U-solve on a time-coarsened copy of the grid and converts
// the optimum to a drift field on the requested grid.
inline PresolveResult convex_presolve_drift(const SpaceTimeGrid& g_main, const Profile& p,
                                            double a, RateTarget target, int max_inner = 600) {
    SpaceTimeGrid gc = g_main;
    gc.nt = std::min(g_main.nt, 96);

    auto setup = [&](UPresolve& up, const SpaceTimeGrid& grid) {
        up.g = &grid;
        up.gamma_faces = sample_profile_faces(grid, p);
        if (target == RateTarget::current) {
            up.tagged = false;
            up.constraint_x = 0.0;
            up.constraint_rhs = a;
        } else {
            up.tagged = true;
            up.constraint_x = a;
            up.constraint_rhs = -p.integrate(0.0, a);
        }
        up.penalty = 4.0 * std::max(1.0, a * a);
        up.barrier_weight = 50.0 * std::max(1.0, a * a) / (grid.dx() * grid.dt());
    };

    UPresolve up;
    setup(up, gc);

    // feasible start: linear-in-time march toward a final deviation phi that
    // fills the cheap side of the density band, U(t,x) = (t/T) int_-L^x phi.
    // It meets the current constraint exactly and stays strictly interior.
    std::vector<double> U(static_cast<std::size_t>(up.nvar()), 0.0);
    if (!up.tagged && a != 0.0) {
        const double sgn = a > 0.0 ? 1.0 : -1.0;
        std::vector<double> phi(static_cast<std::size_t>(gc.faces()));
        // headrooms on the filling / draining sides, kept off the band edges
        for (int f = 0; f < gc.faces(); ++f) {
            const double gam = up.gamma_faces[static_cast<std::size_t>(f)];
            const double head = sgn * gc.xf(f) >= 0.0 ? (1.0 - up.band) - gam
                                                      : -(gam - up.band);
            phi[static_cast<std::size_t>(f)] = 0.9 * sgn * head;
        }
        // shrink the support until int_0^{sgn inf} phi matches |a|
        double reach = 0.0, acc = 0.0;
        for (int f = 0; f < gc.faces(); ++f) {
            const double x = gc.xf(f);
            if (sgn * x < 0.0) continue;
            acc += sgn * phi[static_cast<std::size_t>(f)] * gc.dx();
            if (acc >= std::abs(a)) {
                reach = std::abs(x) + gc.dx();
                break;
            }
        }
        if (reach == 0.0) reach = gc.L;  // domain-limited; AL adjusts
        std::vector<double> final_row(static_cast<std::size_t>(gc.nx - 2));
        double Ux = 0.0;
        for (int i = 1; i <= gc.nx - 2; ++i) {
            const int f = i - 1;  // face between nodes i-1 and i
            if (std::abs(gc.xf(f)) <= reach) Ux += phi[static_cast<std::size_t>(f)] * gc.dx();
            final_row[static_cast<std::size_t>(i - 1)] = Ux;
        }
        // rescale so -U(T,0) = a exactly, then fill earlier times linearly
        const int i0 = static_cast<int>(std::llround((0.0 - gc.x(0)) / gc.dx()));
        const double UT0 = final_row[static_cast<std::size_t>(
            std::max(1, std::min(i0, gc.nx - 2)) - 1)];
        const double scale = UT0 != 0.0 ? -a / UT0 : 0.0;
        for (int i = 1; i <= gc.nx - 2; ++i)
            for (int k = 1; k <= gc.nt; ++k)
                U[static_cast<std::size_t>(k - 1) * (gc.nx - 2) + (i - 1)] =
                    scale * final_row[static_cast<std::size_t>(i - 1)] *
                    static_cast<double>(k) / gc.nt;
    }
    presolve_al_loop(up, U, a, max_inner, 8);

    PresolveResult out;
    {
        const double eta_hold = up.eta, pen_hold = up.penalty;
        up.eta = 0.0;
        up.penalty = 0.0;
        out.value = up.eval(U, nullptr);
        up.eta = eta_hold;
        up.penalty = pen_hold;
    }

    // convert to a drift field on the fine grid, interpolating the coarse
    // face quantities linearly in time; cap against the fine CFL limit (two
    // faces touch each node, hence the 0.45 factor)
    out.h = Array2(g_main.nt, g_main.faces());
    const double h_cap = 0.45 * g_main.dx() / g_main.dt();
    const double dtc = gc.dt();
    auto face_quantities = [&](int kc, int f, double& mu, double& jv, double& mx) {
        mu = 0.5 * (up.mu_face(U, kc, f) + up.mu_face(U, kc + 1, f));
        jv = -((up.Uat(U, kc + 1, f) + up.Uat(U, kc + 1, f + 1)) -
               (up.Uat(U, kc, f) + up.Uat(U, kc, f + 1))) /
             (2.0 * dtc);
        const double mxl = f > 0 ? 0.5 * (up.mu_face(U, kc, f - 1) + up.mu_face(U, kc + 1, f - 1))
                                 : mu;
        const double mxr = f + 1 < gc.faces()
                               ? 0.5 * (up.mu_face(U, kc, f + 1) + up.mu_face(U, kc + 1, f + 1))
                               : mu;
        mx = (mxr - mxl) / (2.0 * gc.dx());
    };
    for (int k = 0; k < g_main.nt; ++k) {
        const double tm = g_main.t_mid(k);
        const double pos = tm / dtc - 0.5;  // coarse midpoint coordinates
        const int k0 = std::max(0, std::min(static_cast<int>(std::floor(pos)), gc.nt - 2));
        const double wt = std::min(1.0, std::max(0.0, pos - k0));
        for (int f = 0; f < g_main.faces(); ++f) {
            double mu0, jv0, mx0, mu1, jv1, mx1;
            face_quantities(k0, f, mu0, jv0, mx0);
            face_quantities(k0 + 1, f, mu1, jv1, mx1);
            const double mu = (1.0 - wt) * mu0 + wt * mu1;
            const double jv = (1.0 - wt) * jv0 + wt * jv1;
            const double mx = (1.0 - wt) * mx0 + wt * mx1;
            const double mt = clip01(mu);
            const double q = std::max(mt * (1.0 - mt), 1e-4);
            const double hv = (jv + 0.5 * mx) / q;
            out.h(k, f) = std::max(-h_cap, std::min(h_cap, hv));
        }
    }
    return out;
}

}  // namespace opt_detail

inline RateResult minimize_rate(const Profile& p, double T, double a, const SpaceTimeGrid& g,
                                InitKind init, RateTarget target,
                                const MinimizeOptions& opts = {}) {
    g.validate_for_pde();
    if (std::abs(g.T - T) > 1e-12) throw std::invalid_argument("minimize_rate: grid horizon");

    opt_detail::Objective obj;
    obj.g = &g;
    obj.bc_l = p.left_tail();
    obj.bc_r = p.right_tail();
    obj.lem = init == InitKind::lem;
    obj.tagged = target == RateTarget::tagged;
    obj.a_target = a;
    obj.gamma_nodes = sample_profile_cells(g, p);
    if (obj.tagged) obj.terminal_coeffs = opt_detail::terminal_mass_coeffs(g, a);
    if (obj.lem && !p.strictly_interior())
        throw std::invalid_argument("minimize_rate: LEM start needs 0 < gamma < 1");

    // initial drift: the closed-form trial solution when its bump fits the
    // domain, otherwise (far targets) a tent-shaped transport field that
    // already carries roughly the requested current.
    std::vector<double> z(static_cast<std::size_t>(obj.nvar()), 0.0);
    double eta0 = opts.init_eta;
    if (opts.warm_start_h) {
        if (opts.warm_start_h->rows != g.nt || opts.warm_start_h->cols != g.faces())
            throw std::invalid_argument("minimize_rate: warm start shape");
        std::copy(opts.warm_start_h->v.begin(), opts.warm_start_h->v.end(), z.begin());
    } else {
        bool trial_used = false;
        try {
            const TrialParams tp = target == RateTarget::current
                                       ? solve_constraint_current(p, T, a)
                                       : solve_constraint_tagged(p, T, a);
            if (tp.lambda > 0.0 && std::abs(tp.L) < 0.9 * g.L) {
                const FieldTriple trial = trial_field(p, T, tp.lambda, tp.L, g);
                std::copy(trial.h.v.begin(), trial.h.v.end(), z.begin());
                trial_used = true;
            }
        } catch (const std::exception&) {
        }
        if (!trial_used) {
            const opt_detail::PresolveResult pre =
                opt_detail::convex_presolve_drift(g, p, a, target);
            std::copy(pre.h.v.begin(), pre.h.v.end(), z.begin());
            if (eta0 == 0.0 && target == RateTarget::current) {
                // multiplier at the optimum is -dJ/da ~ -3 J(a)/(a - v_T)
                const double gap = a - lln_current(p, T);
                if (gap != 0.0) eta0 = -3.0 * pre.value / gap;
            }
        }
    }
    if (obj.lem) {
        for (int i = 1; i <= g.nx - 2; ++i) {
            const double gv = clip01(obj.gamma_nodes[static_cast<std::size_t>(i)]);
            z[static_cast<std::size_t>(obj.nh() + i - 1)] = std::log(gv / (1.0 - gv));
        }
    }

    // make sure the start is stable; shrink the drift if not
    for (int tries = 0; tries < 12 && !std::isfinite(obj.eval(z, nullptr)); ++tries)
        for (int i = 0; i < obj.nh(); ++i) z[static_cast<std::size_t>(i)] *= 0.5;

    auto fn = [&obj](const std::vector<double>& zz, std::vector<double>* gg) {
        return obj.eval(zz, gg);
    };

    const double eps_c = opts.eps_c_factor * std::max(1.0, std::abs(a));
    obj.penalty = opts.penalty0 * std::max(1.0, std::abs(a));
    obj.eta = eta0;

    RateResult res;
    double c_prev = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        res.iterations += opt_detail::lbfgs_minimize(z, fn, opts.max_inner, opts.grad_tol,
                                                     opts.lbfgs_memory);
        double rate = 0.0, c = 0.0;
        obj.eval(z, nullptr, &rate, &c);
        res.value = rate;
        res.feasibility = std::abs(c);
        if (res.feasibility <= eps_c) {
            res.converged = true;
            break;
        }
        obj.eta += obj.penalty * c;
        if (res.feasibility > 0.25 * c_prev) obj.penalty *= 8.0;
        c_prev = res.feasibility;
    }

    // If the AL left a residual, close it with a scalar corrective layer:
    // h + delta * tent carries extra current monotonically in delta, so a
    // secant iteration pins the constraint. The value reported afterwards is
    // that of an exactly-feasible field.
    if (res.feasibility > eps_c) {
        std::vector<double> tent(static_cast<std::size_t>(obj.nh()));
        for (int k = 0; k < g.nt; ++k) {
            const double front = 2.0 * (1.0 - g.t_mid(k) / g.T);  // act before saturation
            for (int f = 0; f < g.faces(); ++f)
                tent[static_cast<std::size_t>(k) * g.faces() + f] =
                    front * std::max(0.0, 1.0 - std::abs(g.xf(f)) / (0.8 * g.L));
        }
        auto c_of = [&](double delta) {
            std::vector<double> zz = z;
            for (int i = 0; i < obj.nh(); ++i)
                zz[static_cast<std::size_t>(i)] += delta * tent[static_cast<std::size_t>(i)];
            double rate = 0.0, c = std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(obj.eval(zz, nullptr, &rate, &c)))
                return std::numeric_limits<double>::quiet_NaN();
            return c;
        };
        double d0 = 0.0, c0 = c_of(0.0);
        double d1 = (c0 > 0.0 ? -1.0 : 1.0) * std::max(0.05, 0.2 * std::abs(c0));
        double c1 = c_of(d1);
        for (int it = 0; it < 24 && std::isfinite(c1) && std::abs(c1) > eps_c; ++it) {
            if (c1 == c0) break;
            const double d2 = d1 - c1 * (d1 - d0) / (c1 - c0);
            d0 = d1;
            c0 = c1;
            d1 = d2;
            c1 = c_of(d1);
        }
        if (std::isfinite(c1) && std::abs(c1) < res.feasibility) {
            for (int i = 0; i < obj.nh(); ++i)
                z[static_cast<std::size_t>(i)] += d1 * tent[static_cast<std::size_t>(i)];
            res.converged = std::abs(c1) <= eps_c;
        }
    }

    Array2 h;
    std::vector<double> mu0;
    obj.unpack(z, h, mu0);
    res.field = solve_forward(h, mu0, g, obj.bc_l, obj.bc_r);
    res.mu0 = std::move(mu0);
    double rate = 0.0, c = 0.0;
    obj.eval(z, nullptr, &rate, &c);
    res.value = rate;
    res.feasibility = std::abs(c);
    return res;
}

inline RateResult minimize_rate_current(const Profile& p, double T, double a,
                                        const SpaceTimeGrid& g, InitKind init,
                                        const MinimizeOptions& opts = {}) {
    return minimize_rate(p, T, a, g, init, RateTarget::current, opts);
}

inline RateResult minimize_rate_tagged(const Profile& p, double T, double a,
                                       const SpaceTimeGrid& g, InitKind init,
                                       const MinimizeOptions& opts = {}) {
    return minimize_rate(p, T, a, g, init, RateTarget::tagged, opts);
}

}  // namespace ssep
