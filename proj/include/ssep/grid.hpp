// grid.hpp -- uniform space-time grid shared by the field code.
#pragma once

#include <stdexcept>
#include <vector>

namespace ssep {

struct SpaceTimeGrid {
    double L = 1.0;  // domain [-L, L]
    int nx = 3;      // spatial nodes
    double T = 1.0;  // horizon
    int nt = 1;      // time steps

    double dx() const { return 2.0 * L / (nx - 1); }
    double dt() const { return T / nt; }
    double x(int i) const { return -L + i * dx(); }
    double xf(int f) const { return -L + (f + 0.5) * dx(); }  // face centers
    double t_node(int k) const { return k * dt(); }
    double t_mid(int k) const { return (k + 0.5) * dt(); }
    int faces() const { return nx - 1; }

    void validate() const {
        if (nx < 3 || nt < 1 || !(L > 0.0) || !(T > 0.0))
            throw std::invalid_argument("grid: bad dimensions");
    }
    // Accuracy budget for the time-split scheme (also the explicit-drift guard).
    void validate_for_pde() const {
        validate();
        if (dt() > dx() * dx() * (1.0 + 1e-12))
            throw std::invalid_argument("grid: need dt <= dx^2; increase nt or decrease nx");
    }
};

struct Array2 {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Array2() = default;
    Array2(int r, int c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}
    double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
};

}  // namespace ssep
