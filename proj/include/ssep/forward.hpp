// forward.hpp -- the controlled hydrodynamic equation
//   d_t mu = (1/2) d_xx mu - d_x[ h mu(1-mu) ]
// solved with Crank-Nicolson diffusion and an explicit drift flux upwinded by
// the sign of h. Boundary nodes are pinned to the tail constants. The stored
// j is the scheme's conserved face flux.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssep/field.hpp"
#include "ssep/grid.hpp"

namespace ssep {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exclusion-form upwind flux through a face; a = left cell, b = right cell.
inline double drift_flux(double h, double a, double b) {
    return h >= 0.0 ? h * a * (1.0 - b) : h * b * (1.0 - a);
}
inline double drift_flux_da(double h, double /*a*/, double b) {
    return h >= 0.0 ? h * (1.0 - b) : -h * b;
}
inline double drift_flux_db(double h, double a, double /*b*/) {
    return h >= 0.0 ? -h * a : h * (1.0 - a);
}
inline double drift_flux_dh(double h, double a, double b) {
    return h >= 0.0 ? a * (1.0 - b) : b * (1.0 - a);
}

// Constant-coefficient symmetric tridiagonal solve for the CN step
// (I + 2beta) on the diagonal, -beta off it, over interior nodes.
class CnFactorization {
  public:
    CnFactorization() = default;
    CnFactorization(int n_interior, double beta) : n_(n_interior), beta_(beta) {
        cp_.resize(n_);
        inv_.resize(n_);
        const double b = 1.0 + 2.0 * beta;
        double denom = b;
        inv_[0] = 1.0 / denom;
        cp_[0] = -beta * inv_[0];
        for (int i = 1; i < n_; ++i) {
            denom = b + beta * cp_[i - 1];
            inv_[i] = 1.0 / denom;
            cp_[i] = -beta * inv_[i];
        }
    }
    // Solves in place; rhs has length n_interior.
    void solve(double* rhs) const {
        rhs[0] *= inv_[0];
        for (int i = 1; i < n_; ++i) rhs[i] = (rhs[i] + beta_ * rhs[i - 1]) * inv_[i];
        for (int i = n_ - 2; i >= 0; --i) rhs[i] -= cp_[i] * rhs[i + 1];
    }
    double beta() const { return beta_; }

  private:
    int n_ = 0;
    double beta_ = 0.0;
    std::vector<double> cp_, inv_;
};

// mu0 has nx entries; h has nt x (nx-1) face values. Boundary densities are
// pinned to (bc_l, bc_r) for every time level.
inline FieldTriple solve_forward(const Array2& h, const std::vector<double>& mu0,
                                 const SpaceTimeGrid& g, double bc_l, double bc_r) {
    g.validate_for_pde();
    const int nx = g.nx, nt = g.nt, nf = g.faces();
    if (static_cast<int>(mu0.size()) != nx) throw std::invalid_argument("solve_forward: mu0 size");
    if (h.rows != nt || h.cols != nf) throw std::invalid_argument("solve_forward: h shape");

    const double dx = g.dx(), dt = g.dt();
    const double beta = dt / (4.0 * dx * dx);
    const CnFactorization cn(nx - 2, beta);

    FieldTriple out;
    out.grid = g;
    out.mu = Array2(nt + 1, nx);
    out.h = h;
    out.j = Array2(nt, nf);

    for (int i = 0; i < nx; ++i) out.mu(0, i) = mu0[i];
    out.mu(0, 0) = bc_l;
    out.mu(0, nx - 1) = bc_r;

    std::vector<double> D(static_cast<std::size_t>(nf));
    std::vector<double> rhs(static_cast<std::size_t>(nx - 2));

    for (int k = 0; k < nt; ++k) {
        const double* m = out.mu.row(k);
        for (int f = 0; f < nf; ++f) D[f] = drift_flux(h(k, f), m[f], m[f + 1]);
        for (int i = 1; i <= nx - 2; ++i) {
            rhs[i - 1] = m[i] + beta * (m[i - 1] - 2.0 * m[i] + m[i + 1]) -
                         (dt / dx) * (D[i] - D[i - 1]);
        }
        rhs[0] += beta * bc_l;
        rhs[nx - 3] += beta * bc_r;
        cn.solve(rhs.data());

        double* mn = out.mu.row(k + 1);
        mn[0] = bc_l;
        mn[nx - 1] = bc_r;
        for (int i = 1; i <= nx - 2; ++i) {
            mn[i] = rhs[i - 1];
            if (mn[i] < -kDensityClip || mn[i] > 1.0 + kDensityClip)
                throw SolverError("solve_forward: density left [0,1] at step " +
                                  std::to_string(k + 1) +
                                  "; refine the grid (smaller dt for this drift)");
        }
        for (int f = 0; f < nf; ++f) {
            const double dmubar =
                0.5 * ((m[f + 1] + mn[f + 1]) - (m[f] + mn[f]));
            out.j(k, f) = -dmubar / (2.0 * dx) + D[f];
        }
    }
    return out;
}

// Samples a profile on the grid nodes.
inline std::vector<double> sample_profile(const SpaceTimeGrid& g, const Profile& p) {
    std::vector<double> v(static_cast<std::size_t>(g.nx));
    for (int i = 0; i < g.nx; ++i) v[i] = p(g.x(i));
    return v;
}

// Cell averages around each node; the right way to discretize initial data
// with jumps (pointwise sampling misplaces O(dx) of mass at a discontinuity
// and drags the scheme down to first order).
inline std::vector<double> sample_profile_cells(const SpaceTimeGrid& g, const Profile& p) {
    std::vector<double> v(static_cast<std::size_t>(g.nx));
    const double h = 0.5 * g.dx();
    for (int i = 0; i < g.nx; ++i)
        v[static_cast<std::size_t>(i)] = p.integrate(g.x(i) - h, g.x(i) + h) / (2.0 * h);
    return v;
}

}  // namespace ssep
