#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ssep/simulator.hpp"
#include "ssep/stats.hpp"
#include "ssep/threads.hpp"

using namespace ssep;

namespace {

Configuration empty_with_tagged(int W) {
    Configuration c;
    c.W = W;
    c.occ.assign(static_cast<std::size_t>(2 * W + 1), 0);
    c.at(0) = 1;
    return c;
}

Configuration full(int W) {
    Configuration c;
    c.W = W;
    c.occ.assign(static_cast<std::size_t>(2 * W + 1), 1);
    return c;
}

}  // namespace

TEST_CASE("a lone particle diffuses at unit rate") {
    const int W = 80;
    const double t = 100.0;
    const std::size_t n = 10000;
    const Configuration init = empty_with_tagged(W);
    RunningStats x2;
    std::vector<double> vals(n);
    parallel_for(n, 0, [&](std::size_t i) {
        SimConfig cfg;
        cfg.t_phys = t;
        cfg.W = W;
        cfg.master_seed = 2024;
        cfg.sample_index = i;
        const TrajectorySample s = run(cfg, init);
        vals[i] = static_cast<double>(s.checkpoints.back().X);
    });
    for (double v : vals) x2.add(v * v / t);
    CHECK(std::abs(x2.mean() - 1.0) < 0.05);
}

TEST_CASE("no events before time zero") {
    const Configuration init = empty_with_tagged(10);
    SimConfig cfg;
    cfg.t_phys = 1.0;
    cfg.W = 10;
    cfg.checkpoints = {0.0, 1.0};
    const TrajectorySample s = run(cfg, init);
    CHECK(s.checkpoints.front().J_origin == 0);
    CHECK(s.checkpoints.front().X == 0);
}

TEST_CASE("the full lattice is frozen") {
    SimConfig cfg;
    cfg.t_phys = 50.0;
    cfg.W = 30;
    cfg.master_seed = 7;
    cfg.store_occupancy = true;
    const TrajectorySample s = run(cfg, full(30));
    CHECK(s.checkpoints.back().J_origin == 0);
    CHECK(s.checkpoints.back().X == 0);
    CHECK(s.final_occupancy.particle_count() == 61);
    // both sides of the r = 1 relation are false
    CHECK(check_tagged_current_relation(s, 1));
}

TEST_CASE("set relations hold for every sample") {
    const int W = 40;
    const Configuration init = make_dic(Profile::step(0.7, 0.35), 6.0, W);
    for (std::uint64_t i = 0; i < 300; ++i) {
        SimConfig cfg;
        cfg.t_phys = 30.0;
        cfg.W = W;
        cfg.master_seed = 5;
        cfg.sample_index = i;
        cfg.store_occupancy = true;
        cfg.checkpoints = {11.0, 30.0};
        const TrajectorySample s = run(cfg, init);
        for (int r = -4; r <= 4; ++r) {
            INFO("sample " << i << " r " << r);
            CHECK(check_tagged_current_relation(s, r));
        }
    }
}

TEST_CASE("cutoff decomposition residual vanishes") {
    const int W = 40;
    const double N = 4.0;
    const Configuration init = make_dic(Profile::constant(0.5), N, W);
    for (std::uint64_t i = 0; i < 100; ++i) {
        SimConfig cfg;
        cfg.t_phys = 24.0;
        cfg.W = W;
        cfg.master_seed = 11;
        cfg.sample_index = i;
        cfg.store_occupancy = true;
        cfg.store_all_bonds = true;
        cfg.checkpoints = {0.0, 24.0};
        const TrajectorySample s = run(cfg, init);
        CHECK(cutoff_decomposition(s, 0, 2, N) == 0.0);  // nothing has moved yet
        CHECK(std::abs(cutoff_decomposition(s, 1, 2, N)) < 1e-9);
    }
}

TEST_CASE("hand-built three-swap history satisfies the cutoff identity") {
    // window [-4,4], n = 1, N = 2, so the cutoff spans sites 0..2 and the
    // sum uses bonds (0,1) and (1,2). Start: particles at -1, 0, 2.
    const int W = 4;
    const double N = 2.0;
    const int n = 1;
    std::vector<int> occ0 = {0, 0, 0, 1, 1, 0, 1, 0, 0};  // sites -4..4
    std::vector<int> occ = occ0;
    std::vector<long long> J(8, 0);  // bond left sites -4..3
    auto swap_bond = [&](int left) {
        const int li = left + W, ri = left + 1 + W;
        if (occ[li] != occ[ri]) J[static_cast<std::size_t>(left + W)] += occ[li] ? 1 : -1;
        std::swap(occ[li], occ[ri]);
    };
    // three swaps by hand: particle at 0 hops right twice, particle at 2 hops right
    swap_bond(2);   // 2 -> 3
    swap_bond(0);   // 0 -> 1
    swap_bond(1);   // 1 -> 2
    // Y(G_n) with G_n(u) = (1 - u/n) on [0, n]: sites 0..nN
    auto Y = [&](const std::vector<int>& state) {
        double sum = 0.0;
        const int nN = static_cast<int>(n * N);
        for (int x = 0; x <= nN; ++x)
            if (state[static_cast<std::size_t>(x + W)])
                sum += 1.0 - static_cast<double>(x) / nN;
        return sum / N;
    };
    double bond_term = 0.0;
    for (int x = 1; x <= static_cast<int>(n * N); ++x)
        bond_term += static_cast<double>(J[static_cast<std::size_t>(x - 1 + W)]);
    bond_term /= (n * N * N);
    const double lhs = static_cast<double>(J[static_cast<std::size_t>(-1 + W)]) / N;
    CHECK(lhs == Catch::Approx(Y(occ) - Y(occ0) + bond_term).margin(1e-12));
}

TEST_CASE("stirring conserves particles, order, and the current bounds") {
    const int W = 40;
    const Configuration init = make_dic(Profile::table(0.3, 0.6, {-1, 0, 1}, {0.3, 0.9, 0.6}),
                                        8.0, W);
    const long long total = init.particle_count();
    const long long left0 = init.count_in(-W, -1);
    const long long right0 = init.count_in(0, W);
    for (std::uint64_t i = 0; i < 200; ++i) {
        SimConfig cfg;
        cfg.t_phys = 40.0;
        cfg.W = W;
        cfg.master_seed = 77;
        cfg.sample_index = i;
        cfg.store_occupancy = true;
        const TrajectorySample s = run(cfg, init);
        const Checkpoint& rec = s.checkpoints.back();
        CHECK(rec.occupancy.particle_count() == total);
        CHECK(rec.occupancy.at(rec.X) == 1);
        CHECK(rec.occupancy.count_in(-W, rec.X - 1) == left0);
        CHECK(rec.J_origin <= left0);
        CHECK(rec.J_origin >= -right0);
    }
}

TEST_CASE("equilibrium marginals stay Bernoulli in the bulk") {
    const int W = 30;
    const double rho = 0.5, t = 20.0;
    const std::size_t n = 12000;
    const Profile p = Profile::constant(rho);
    std::vector<int> bulk_count(n);
    parallel_for(n, 0, [&](std::size_t i) {
        // plain product measure, origin left free
        Rng rng(404 ^ 0x5851f42d4c957f2dull, i);
        Configuration init;
        init.W = W;
        init.occ.assign(static_cast<std::size_t>(2 * W + 1), 0);
        for (int x = -W; x <= W; ++x) init.at(x) = rng.bernoulli(rho) ? 1 : 0;
        SimConfig cfg;
        cfg.t_phys = t;
        cfg.W = W;
        cfg.master_seed = 404;
        cfg.sample_index = i;
        cfg.store_occupancy = true;
        const TrajectorySample s = run(cfg, init);
        int cnt = 0;
        for (int x = -10; x <= 10; ++x)
            if (x != 0) cnt += s.checkpoints.back().occupancy.at(x);
        bulk_count[i] = cnt;
    });
    RunningStats st;
    for (int v : bulk_count) st.add(static_cast<double>(v) / 20.0);
    CHECK(std::abs(st.mean() - rho) < 4.0 * st.stderr_mean());
}

TEST_CASE("current equals its compensator plus a mean-zero remainder") {
    const int W = 40;
    const double t = 30.0;
    const std::size_t n = 10000;
    const Profile p = Profile::constant(0.5);
    RunningStats rem;
    std::vector<double> vals(n);
    parallel_for(n, 0, [&](std::size_t i) {
        Rng rng(812 ^ 0x5851f42d4c957f2dull, i);
        const Configuration init = sample_lem(p, 1.0, W, rng);
        SimConfig cfg;
        cfg.t_phys = t;
        cfg.W = W;
        cfg.master_seed = 812;
        cfg.sample_index = i;
        const TrajectorySample s = run(cfg, init);
        const Checkpoint& rec = s.checkpoints.back();
        vals[i] = static_cast<double>(rec.J_origin) - rec.compensator;
    });
    for (double v : vals) rem.add(v);
    CHECK(std::abs(rem.mean()) < 4.0 * rem.stderr_mean());
}

TEST_CASE("runs are reproducible and distinct across stream indices") {
    const Configuration init = make_dic(Profile::constant(0.5), 5.0, 25);
    SimConfig cfg;
    cfg.t_phys = 20.0;
    cfg.W = 25;
    cfg.master_seed = 99;
    cfg.sample_index = 4;
    const TrajectorySample a = run(cfg, init);
    const TrajectorySample b = run(cfg, init);
    CHECK(a.checkpoints.back().J_origin == b.checkpoints.back().J_origin);
    CHECK(a.final_occupancy.occ == b.final_occupancy.occ);
    cfg.sample_index = 5;
    const TrajectorySample c = run(cfg, init);
    CHECK(a.final_occupancy.occ != c.final_occupancy.occ);
}

TEST_CASE("window mismatch and bad bonds are rejected") {
    const Configuration init = make_dic(Profile::constant(0.5), 5.0, 25);
    SimConfig cfg;
    cfg.t_phys = 1.0;
    cfg.W = 30;
    CHECK_THROWS(run(cfg, init));
    cfg.W = 25;
    CHECK_THROWS(run(cfg, init, {40}));
}
