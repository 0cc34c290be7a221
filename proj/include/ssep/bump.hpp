// bump.hpp -- the compactly supported bump family used by the closed-form
// trial densities, with its quadratures cached once.
//
//   psi0(x) = exp(-1/(1-x^2)) on (-1,1)
//   psi(x)  = -psi0(2(x+1/2)) for x <= 0,  psi0(2(x-1/2)) for x >= 0
//   Psi(x)  = int_{-1}^x psi   (antisymmetric integrand; Psi(+-1) = 0)
//   eps(t)  = smooth ramp, 0 on [0, 1/10], 1 at t = 1.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssep/math_util.hpp"

namespace ssep {

inline double psi0(double x) {
    const double w = 1.0 - x * x;
    if (w <= 1e-12) return 0.0;
    return std::exp(-1.0 / w);
}

inline double psi0_prime(double x) {
    const double w = 1.0 - x * x;
    if (w <= 1e-12) return 0.0;
    return psi0(x) * (-2.0 * x / (w * w));
}

inline double psi_bump(double x) {
    if (x <= 0.0) return -psi0(2.0 * (x + 0.5));
    return psi0(2.0 * (x - 0.5));
}

inline double psi_bump_prime(double x) {
    if (x <= 0.0) return -2.0 * psi0_prime(2.0 * (x + 0.5));
    return 2.0 * psi0_prime(2.0 * (x - 0.5));
}

class BumpCalculus {
  public:
    BumpCalculus() {
        // cumulative integral of psi0 on [-1,1] over a fine table
        table_.resize(kCells + 1, 0.0);
        for (int i = 1; i <= kCells; ++i)
            table_[i] = table_[i - 1] + gauss5(psi0, node(i - 1), node(i));
        int_psi0_ = table_[kCells];
        int_psi_01_ = 0.5 * int_psi0_;
        int_psi_prime_sq_ =
            2.0 * adaptive_simpson([](double x) { const double d = psi_bump_prime(x);
                                                  return d * d; },
                                   0.0, 1.0, 1e-12);
        int_Psi_sq_ = adaptive_simpson([this](double x) { const double v = Psi(x);
                                                          return v * v; },
                                       -1.0, 1.0, 1e-12);
        eps_prime_max_ = 2.0 * psi0(0.0) / (0.9 * int_psi0_);
        eps_star_ = 1.0 + eps_prime_max_ * eps_prime_max_;
    }

    // P(u) = int_{-1}^u psi0, u in [-1,1].
    double psi0_cumulative(double u) const {
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return int_psi0_;
        const double pos = (u + 1.0) / kStep;
        const int cell = std::min(static_cast<int>(pos), kCells - 1);
        return table_[cell] + gauss5(psi0, node(cell), u);
    }

    double Psi(double x) const {
        if (x <= -1.0 || x >= 1.0) return 0.0;
        if (x <= 0.0) return -0.5 * psi0_cumulative(2.0 * x + 1.0);
        return -0.5 * int_psi0_ + 0.5 * psi0_cumulative(2.0 * x - 1.0);
    }

    // int_x^1 psi for x in [0,1].
    double int_psi_tail(double x) const {
        if (x <= 0.0) return int_psi_01_;
        if (x >= 1.0) return 0.0;
        return 0.5 * (int_psi0_ - psi0_cumulative(2.0 * x - 1.0));
    }

    // ramp with eps = 0 on [0,1/10], eps(1) = 1
    double eps(double t) const {
        if (t <= 0.1) return 0.0;
        if (t >= 1.0) return 1.0;
        const double v = (t - 0.1) / 0.9;
        return psi0_cumulative(2.0 * v - 1.0) / int_psi0_;
    }
    double eps_prime(double t) const {
        if (t <= 0.1 || t >= 1.0) return 0.0;
        const double v = (t - 0.1) / 0.9;
        return 2.0 * psi0(2.0 * v - 1.0) / (0.9 * int_psi0_);
    }

    double int_psi0() const { return int_psi0_; }
    double int_psi_01() const { return int_psi_01_; }          // int_0^1 psi
    double int_psi_prime_sq() const { return int_psi_prime_sq_; }
    double int_Psi_sq() const { return int_Psi_sq_; }
    double eps_prime_max() const { return eps_prime_max_; }
    double eps_star() const { return eps_star_; }              // 1 + ||eps'||_inf^2

  private:
    static constexpr int kCells = 4096;
    static constexpr double kStep = 2.0 / kCells;
    static double node(int i) { return -1.0 + i * kStep; }

    std::vector<double> table_;
    double int_psi0_ = 0.0, int_psi_01_ = 0.0;
    double int_psi_prime_sq_ = 0.0, int_Psi_sq_ = 0.0;
    double eps_prime_max_ = 0.0, eps_star_ = 0.0;
};

inline const BumpCalculus& bumps() {
    static const BumpCalculus instance;
    return instance;
}

}  // namespace ssep
