// simulator.hpp -- continuous-time Harris-stirring simulation of SSEP.
//
// Each bond (x,x+1) in the window rings at rate 1/2; a single exponential
// clock of rate (#bonds)/2 plus a uniform bond choice realizes the
// superposition. A ring swaps the bond's contents; the exclusion process is
// the occupancy image, so currents and the tagged particle move only when
// the two occupancies differ (suppressed jumps never cross the tagged
// particle, preserving single-file order).
//
// Boundary handling: sites beyond [-W, W] are frozen. Two "influence"
// walkers start at the window edges and follow the stirring contents (they
// move on every ring of their bond); a sample is flagged when either walker
// diffuses to within 2 sites of the tracked region, or the tagged particle
// gets within 2 sites of the edge.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "ssep/lattice.hpp"
#include "ssep/profile.hpp"
#include "ssep/rng.hpp"

namespace ssep {

struct SimConfig {
    double t_phys = 1.0;                // physical horizon (experiments pass N^2 * T_macro)
    int W = 100;                        // window half-width in sites
    std::uint64_t master_seed = 1;
    std::uint64_t sample_index = 0;
    std::vector<double> checkpoints;    // sorted, <= t_phys; t_phys appended if missing
    bool store_occupancy = false;       // snapshot occupancy at checkpoints
    bool store_all_bonds = false;       // snapshot every bond current at checkpoints
};

// Default window: profile support plus a 6*sqrt(time) diffusive buffer.
inline int default_window(const Profile& p, double N, double T_macro, double safety = 1.0) {
    const double reach = std::max({std::abs(p.x_lo()), std::abs(p.x_hi()), 1.0});
    return static_cast<int>(std::ceil(safety * (N * reach + 6.0 * N * std::sqrt(T_macro))));
}

struct Checkpoint {
    double t = 0.0;
    long long J_origin = 0;             // integrated current across bond (-1,0)
    int X = 0;                          // tagged position
    double compensator = 0.0;           // (1/2) int_0^t [eta_s(-1) - eta_s(0)] ds
    bool boundary_flag = false;
    std::map<int, long long> bond_currents;      // requested bonds, key = left site
    std::vector<long long> all_bonds;            // when store_all_bonds
    Configuration occupancy;                     // when store_occupancy
};

struct TrajectorySample {
    Configuration initial;
    std::vector<Checkpoint> checkpoints;
    Configuration final_occupancy;
    bool boundary_flag = false;
    bool tagged_tracked = false;
};

inline TrajectorySample run(const SimConfig& cfg, const Configuration& init,
                            const std::vector<int>& track_bonds = {}) {
    const int W = cfg.W;
    if (init.W != W) throw std::invalid_argument("run: window mismatch");
    for (int b : track_bonds)
        if (b < -W || b >= W) throw std::invalid_argument("run: tracked bond outside window");

    std::vector<double> cps = cfg.checkpoints;
    std::sort(cps.begin(), cps.end());
    for (double t : cps)
        if (t < 0.0 || t > cfg.t_phys) throw std::invalid_argument("run: checkpoint out of range");
    if (cps.empty() || cps.back() < cfg.t_phys) cps.push_back(cfg.t_phys);

    TrajectorySample out;
    out.initial = init;
    out.tagged_tracked = init.at(0) != 0;

    std::vector<std::uint8_t> occ = init.occ;
    auto o = [&](int site) -> std::uint8_t& { return occ[static_cast<std::size_t>(site + W)]; };
    const int n_bonds = 2 * W;  // left sites -W .. W-1
    std::vector<long long> J(static_cast<std::size_t>(n_bonds), 0);
    auto Jb = [&](int left) -> long long& { return J[static_cast<std::size_t>(left + W)]; };

    int tagged = 0;
    // tracked region hull for the influence flag
    int core_lo = -1, core_hi = 0;
    for (int b : track_bonds) {
        core_lo = std::min(core_lo, b);
        core_hi = std::max(core_hi, b + 1);
    }
    int walker_l = -W, walker_r = W;
    bool flag = false;
    auto check_flag = [&] {
        if (walker_l >= core_lo - 2 || walker_r <= core_hi + 2) flag = true;
        if (out.tagged_tracked &&
            (std::abs(walker_l - tagged) <= 2 || std::abs(walker_r - tagged) <= 2)) flag = true;
        if (W - std::abs(tagged) <= 2) flag = true;
    };
    check_flag();

    Rng rng(cfg.master_seed, cfg.sample_index);
    const double rate = 0.5 * static_cast<double>(n_bonds);

    double t = 0.0, comp = 0.0;
    int d_comp = static_cast<int>(o(-1)) - static_cast<int>(o(0));
    std::size_t cp = 0;

    auto emit = [&](double t_cp) {
        Checkpoint rec;
        rec.t = t_cp;
        rec.J_origin = Jb(-1);
        rec.X = tagged;
        rec.compensator = comp;
        rec.boundary_flag = flag;
        for (int b : track_bonds) rec.bond_currents[b] = Jb(b);
        if (cfg.store_all_bonds) rec.all_bonds = J;
        if (cfg.store_occupancy) {
            rec.occupancy.W = W;
            rec.occupancy.occ = occ;
        }
        out.checkpoints.push_back(std::move(rec));
    };

    while (cp < cps.size()) {
        const double t_next = t + rng.exponential(rate);
        while (cp < cps.size() && cps[cp] <= t_next) {
            comp += 0.5 * d_comp * (cps[cp] - t);
            t = cps[cp];
            emit(t);
            ++cp;
        }
        if (cp == cps.size()) break;
        comp += 0.5 * d_comp * (t_next - t);
        t = t_next;

        const int b = -W + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_bonds)));
        const std::uint8_t l = o(b), r = o(b + 1);
        if (l != r) {
            o(b) = r;
            o(b + 1) = l;
            Jb(b) += l ? 1 : -1;
            if (out.tagged_tracked) {
                if (tagged == b && l)
                    tagged = b + 1;
                else if (tagged == b + 1 && r)
                    tagged = b;
            }
            if (b >= -2 && b <= 0) d_comp = static_cast<int>(o(-1)) - static_cast<int>(o(0));
        }
        // stirring contents move on every ring
        if (walker_l == b)
            walker_l = b + 1;
        else if (walker_l == b + 1)
            walker_l = b;
        if (walker_r == b)
            walker_r = b + 1;
        else if (walker_r == b + 1)
            walker_r = b;
        check_flag();
    }

    out.final_occupancy.W = W;
    out.final_occupancy.occ = occ;
    out.boundary_flag = flag;
    return out;
}

// Tagged/current set relations, in their sharp forms:
//   r > 0:  {X_t >= r} = {J_{-1,0}(t) >= sum_{x=0}^{r-1} eta_t(x)}
//   r < 0:  {X_t <= r} = {J_{-1,0}(t) <= -sum_{x=r+1}^{-1} eta_t(x) - 1}
//   r = 0:  {X_t <= 0} = {J_{-1,0}(t) <= eta_t(0) - 1}
// The positive display is exact as usually written because in its boundary
// case the tagged particle itself occupies a site of [0, r-1]. The commonly
// displayed negative/zero forms (with -sum_{x=r}^{-1} eta_t(x) resp. 0 on the
// right) are one-sided only: the tagged particle hopping off the origin with
// no crossings of bond (-1,0) gives X = 1, J = 0 against them. Requires
// store_occupancy. Returns true iff the identity holds at every checkpoint.
inline bool check_tagged_current_relation(const TrajectorySample& s, int r) {
    if (!s.tagged_tracked) throw std::invalid_argument("relation check: no tagged particle");
    for (const auto& rec : s.checkpoints) {
        if (rec.occupancy.occ.empty())
            throw std::invalid_argument("relation check: occupancy not stored");
        bool lhs, rhs;
        if (r > 0) {
            lhs = rec.X >= r;
            rhs = rec.J_origin >= rec.occupancy.count_in(0, r - 1);
        } else if (r < 0) {
            lhs = rec.X <= r;
            rhs = rec.J_origin <= -rec.occupancy.count_in(r + 1, -1) - 1;
        } else {
            lhs = rec.X <= 0;
            rhs = rec.J_origin <= static_cast<long long>(rec.occupancy.at(0)) - 1;
        }
        if (lhs != rhs) return false;
    }
    return true;
}

// Summation-by-parts residual with the cutoff G_n(u) = 1_{[0,n]}(u)(1-u/n):
//   (1/N) J_{-1,0} - [Y_t(G_n) - Y_0(G_n) + (1/(n N^2)) sum_{x=1}^{nN} J_{x-1,x}]
// at the given checkpoint; algebraically zero.
inline double cutoff_decomposition(const TrajectorySample& s, std::size_t checkpoint_idx,
                                   int n, double N) {
    const auto& rec = s.checkpoints.at(checkpoint_idx);
    const int nN = static_cast<int>(std::llround(n * N));
    const int W = s.initial.W;
    if (rec.all_bonds.empty() || nN > W)
        throw std::invalid_argument("cutoff_decomposition: missing tracked bonds");
    if (rec.occupancy.occ.empty())
        throw std::invalid_argument("cutoff_decomposition: occupancy not stored");
    auto Y = [&](const Configuration& c) {
        double sum = 0.0;
        for (int x = 0; x <= nN; ++x)
            if (c.at(x)) sum += 1.0 - static_cast<double>(x) / nN;
        return sum / N;
    };
    double bond_term = 0.0;
    for (int x = 1; x <= nN; ++x)
        bond_term += static_cast<double>(rec.all_bonds[static_cast<std::size_t>(x - 1 + W)]);
    bond_term /= (static_cast<double>(n) * N * N);
    const double lhs = static_cast<double>(rec.J_origin) / N;
    return lhs - (Y(rec.occupancy) - Y(s.initial) + bond_term);
}

}  // namespace ssep
