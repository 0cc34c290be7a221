#include <catch2/catch_amalgamated.hpp>

#include "ssep/profile.hpp"
#include "ssep/rng.hpp"

using namespace ssep;

TEST_CASE("constant profile evaluates everywhere") {
    const Profile p = Profile::constant(0.5);
    CHECK(p(3.7) == 0.5);
    CHECK(p(-100.0) == 0.5);
}

TEST_CASE("step profile takes the left value at and left of the jump") {
    const Profile p = Profile::step(0.8, 0.2);
    CHECK(p(-1.0) == 0.8);
    CHECK(p(1.0) == 0.2);
    CHECK(p(0.0) == 0.8);
}

TEST_CASE("indicator block is one inside and zero outside") {
    const Profile p = Profile::indicator(-1.0, 1.0);
    CHECK(p(0.0) == 1.0);
    CHECK(p(0.99) == 1.0);
    CHECK(p(1.5) == 0.0);
    CHECK(p(-2.0) == 0.0);
}

TEST_CASE("table profile interpolates linearly") {
    const Profile p = Profile::table(0.3, 0.6, {-1.0, 0.0, 1.0}, {0.3, 0.9, 0.6});
    CHECK(p(-0.5) == Catch::Approx(0.6));
    CHECK(p(0.5) == Catch::Approx(0.75));
    CHECK(p(-3.0) == 0.3);
    CHECK(p(3.0) == 0.6);
}

TEST_CASE("profile integral matches a Riemann sum") {
    const Profile p = Profile::table(0.3, 0.6, {-1.0, 0.0, 1.0}, {0.3, 0.9, 0.6});
    const double a = -2.3, b = 1.7;
    const int n = 200000;
    double riemann = 0.0;
    for (int i = 0; i < n; ++i) riemann += p(a + (b - a) * (i + 0.5) / n) * (b - a) / n;
    CHECK(p.integrate(a, b) == Catch::Approx(riemann).margin(1e-8));
    CHECK(p.integrate(b, a) == Catch::Approx(-p.integrate(a, b)));
}

TEST_CASE("profile spec strings parse") {
    CHECK(Profile::parse("constant 0.5")(2.0) == 0.5);
    CHECK(Profile::parse("step 0.8 0.2")(-1.0) == 0.8);
    CHECK(Profile::parse("indicator -1 1")(0.0) == 1.0);
    CHECK(Profile::parse("table 0.3 0.6 -1 0.3 0 0.9 1 0.6")(0.5) == Catch::Approx(0.75));
    CHECK_THROWS(Profile::parse("gauss 1"));
    CHECK_THROWS(Profile::parse("constant 1.5"));
    CHECK_THROWS(Profile::parse("step 0.8"));
    CHECK_THROWS(Profile::parse("table 0.3 0.6 1 0.5 0 0.5"));  // x not increasing
}

TEST_CASE("shift and reflection act on the support") {
    const Profile p = Profile::step(0.8, 0.2);
    const Profile q = p.shifted(1.0);  // gamma(x + 1)
    CHECK(q(-1.5) == 0.8);
    CHECK(q(0.0) == 0.2);
    const Profile r = p.reflected();
    CHECK(r(-1.0) == 0.2);
    CHECK(r(1.0) == 0.8);

    const Profile t = Profile::table(0.3, 0.6, {-1.0, 0.0, 1.0}, {0.3, 0.9, 0.6});
    const Profile tr = t.reflected();
    Rng rng(5, 0);
    for (int i = 0; i < 50; ++i) {
        const double x = 4.0 * (2.0 * rng.uniform() - 1.0);
        CHECK(tr(x) == Catch::Approx(t(-x)).margin(1e-12));
    }
}

TEST_CASE("interior check distinguishes degenerate profiles") {
    CHECK(Profile::step(0.8, 0.2).strictly_interior());
    CHECK_FALSE(Profile::indicator(-1.0, 1.0).strictly_interior());
}
