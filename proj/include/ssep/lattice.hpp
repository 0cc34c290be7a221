// lattice.hpp -- microscopic initial states on a finite window.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ssep/profile.hpp"
#include "ssep/rng.hpp"

namespace ssep {

// Occupancy of sites in [-W, W]. Sites outside are frozen at the tail
// densities and never touched by the dynamics.
struct Configuration {
    int W = 0;
    std::vector<std::uint8_t> occ;  // size 2W+1, index site + W

    std::uint8_t at(int site) const { return occ[static_cast<std::size_t>(site + W)]; }
    std::uint8_t& at(int site) { return occ[static_cast<std::size_t>(site + W)]; }

    long long particle_count() const {
        long long n = 0;
        for (auto v : occ) n += v;
        return n;
    }
    long long count_in(int a, int b) const {  // sites in [a, b]
        long long n = 0;
        for (int x = std::max(a, -W); x <= std::min(b, W); ++x) n += at(x);
        return n;
    }
};

// Deterministic placement by cumulative rounding: site x occupied iff
// floor(C(x+1)) > floor(C(x)) with C the running integral of gamma(./N)
// from the window edge. Interval counts then track N*int gamma within O(1).
// Site 0 is forced occupied afterwards.
inline Configuration make_dic(const Profile& p, double N, int W) {
    if (N < 1.0) throw std::invalid_argument("make_dic: need N >= 1");
    if (W < 1) throw std::invalid_argument("make_dic: need W >= 1");
    Configuration c;
    c.W = W;
    c.occ.assign(static_cast<std::size_t>(2 * W + 1), 0);
    double C = 0.0;
    long long fl = 0;  // floor(C) tracked incrementally
    for (int x = -W; x <= W; ++x) {
        C += N * p.integrate(x / N, (x + 1) / N);
        const long long fl_next = static_cast<long long>(std::floor(C + 1e-12));
        if (fl_next > fl) c.at(x) = 1;
        fl = fl_next;
    }
    c.at(0) = 1;
    return c;
}

// Independent Bernoulli(gamma(x/N)) marginals; site 0 forced occupied.
inline Configuration sample_lem(const Profile& p, double N, int W, Rng& rng) {
    if (!p.strictly_interior())
        throw std::invalid_argument("sample_lem: profile must satisfy 0 < gamma < 1");
    Configuration c;
    c.W = W;
    c.occ.assign(static_cast<std::size_t>(2 * W + 1), 0);
    for (int x = -W; x <= W; ++x) c.at(x) = rng.bernoulli(p(x / N)) ? 1 : 0;
    c.at(0) = 1;
    return c;
}

// Y(G) = (1/N) sum_x G(x/N) eta(x); G must be supported inside the window.
inline double empirical_density(const Configuration& c, double N,
                                const std::function<double(double)>& G,
                                double support_lo, double support_hi) {
    if (support_lo * N < -c.W - 1 || support_hi * N > c.W + 1)
        throw std::invalid_argument("empirical_density: test function exceeds window");
    double sum = 0.0;
    const int lo = static_cast<int>(std::ceil(support_lo * N));
    const int hi = static_cast<int>(std::floor(support_hi * N));
    for (int x = std::max(lo, -c.W); x <= std::min(hi, c.W); ++x)
        if (c.at(x)) sum += G(x / N);
    return sum / N;
}

}  // namespace ssep
