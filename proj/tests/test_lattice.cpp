#include <catch2/catch_amalgamated.hpp>

#include "ssep/lattice.hpp"
#include "ssep/rng.hpp"
#include "ssep/stats.hpp"

using namespace ssep;

TEST_CASE("half density gives the alternating configuration") {
    const Configuration c = make_dic(Profile::constant(0.5), 4.0, 4);
    CHECK(c.at(0) == 1);
    const long long count = c.particle_count();
    CHECK(count >= 4);  // ceil(9/2) = 5 with +-1 slack
    CHECK(count <= 6);
    // no two adjacent empty runs longer than one site away from the origin fix
    int max_run = 0, run = 0;
    for (int x = -4; x <= 4; ++x) {
        run = c.at(x) ? 0 : run + 1;
        max_run = std::max(max_run, run);
    }
    CHECK(max_run <= 1);
}

TEST_CASE("full profile occupies every site") {
    const Configuration c = make_dic(Profile::constant(1.0), 7.0, 30);
    CHECK(c.particle_count() == 61);
}

TEST_CASE("deterministic placement tracks the profile mass on intervals") {
    const Profile p = Profile::step(0.8, 0.2);
    const double N = 50.0;
    const Configuration c = make_dic(p, N, 200);
    // the [-1, 1] macroscopic window
    const long long count = c.count_in(-50, 50);
    const double target = N * p.integrate(-50.0 / N, (50.0 + 1.0) / N);
    CHECK(std::abs(count - target) <= 2.0);
    // random intervals
    Rng rng(9, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const int a = -200 + static_cast<int>(rng.uniform_int(200));
        const int b = a + 1 + static_cast<int>(rng.uniform_int(180));
        const double mass = N * p.integrate(a / N, (b + 1) / N);
        CHECK(std::abs(c.count_in(a, b) - mass) <= 2.0 + 1e-9);
    }
}

TEST_CASE("empirical density of the deterministic state approximates the profile") {
    const Profile p = Profile::step(0.8, 0.2);
    const double N = 50.0;
    const Configuration c = make_dic(p, N, 200);
    auto G = [](double) { return 1.0; };
    const double emp = empirical_density(c, N, G, -1.0, 1.0);
    // Riemann oracle of int_{-1}^{1} gamma
    double riemann = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) riemann += p(-1.0 + 2.0 * (i + 0.5) / n) * 2.0 / n;
    CHECK(std::abs(emp - riemann) <= 2.0 / N);
}

TEST_CASE("local equilibrium sampling hits the marginals") {
    const Profile p = Profile::constant(0.5);
    Rng rng(123, 7);
    const Configuration c = sample_lem(p, 10.0, 5000, rng);
    CHECK(c.at(0) == 1);
    const double n_sites = 10001.0;
    const double mean = static_cast<double>(c.particle_count()) / n_sites;
    const double se = std::sqrt(0.25 / n_sites);
    CHECK(std::abs(mean - 0.5) <= 3.0 * se + 1.0 / n_sites);
}

TEST_CASE("origin is occupied in every draw") {
    const Profile p = Profile::table(0.3, 0.6, {-1.0, 0.0, 1.0}, {0.3, 0.2, 0.6});
    for (std::uint64_t i = 0; i < 64; ++i) {
        Rng rng(99, i);
        CHECK(sample_lem(p, 6.0, 40, rng).at(0) == 1);
    }
}

TEST_CASE("sampling is deterministic given the seed") {
    const Profile p = Profile::step(0.7, 0.3);
    Rng r1(42, 3), r2(42, 3), r3(42, 4);
    const Configuration a = sample_lem(p, 8.0, 100, r1);
    const Configuration b = sample_lem(p, 8.0, 100, r2);
    const Configuration c = sample_lem(p, 8.0, 100, r3);
    CHECK(a.occ == b.occ);
    CHECK(a.occ != c.occ);
}

TEST_CASE("degenerate profiles cannot be sampled") {
    Rng rng(1, 0);
    CHECK_THROWS(sample_lem(Profile::indicator(-1.0, 1.0), 5.0, 20, rng));
}

TEST_CASE("empirical density rejects test functions beyond the window") {
    const Configuration c = make_dic(Profile::constant(0.5), 4.0, 10);
    CHECK_THROWS(empirical_density(c, 4.0, [](double) { return 1.0; }, -5.0, 5.0));
}

TEST_CASE("empirical density counts sites for the full lattice") {
    const double N = 7.0;
    const Configuration c = make_dic(Profile::constant(1.0), N, 40);
    const double v = empirical_density(c, N, [](double) { return 1.0; }, 0.0, 1.0);
    CHECK(v == Catch::Approx((std::floor(N) + 1.0) / N));
    const Configuration empty{40, std::vector<std::uint8_t>(81, 0)};
    CHECK(empirical_density(empty, N, [](double) { return 1.0; }, 0.0, 1.0) == 0.0);
}
