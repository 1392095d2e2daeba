#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "ddelab/model.hpp"

using namespace ddelab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("cartesian rhs matches a hand-computed value") {
    // x' = x - y - x_d(x^2+y^2), y' = x + y - y_d(x^2+y^2)
    // at (1, 2) with delayed (3, -1): x' = 1-2-3*5 = -16, y' = 1+2+1*5 = 8.
    const CartesianState d = cartesian_rhs({}, {1.0, 2.0}, {3.0, -1.0});
    CHECK(d.x == -16.0);
    CHECK(d.y == 8.0);
}

TEST_CASE("polar rhs agrees with the cartesian form") {
    std::mt19937 gen(20240210);
    std::uniform_real_distribution<double> rad(0.2, 3.0);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const PolarState cur{rad(gen), ang(gen)};
        const PolarState del{rad(gen), ang(gen)};
        const CartesianState c = to_cartesian(cur);
        const CartesianState cd = to_cartesian(del);
        const CartesianState dc = cartesian_rhs({}, c, cd);
        const PolarState dp = polar_rhs({}, cur, del);
        // chain rule: r' = (x x' + y y')/r, theta' = (x y' - y x')/r^2
        const double rdot = (c.x * dc.x + c.y * dc.y) / cur.r;
        const double thdot = (c.x * dc.y - c.y * dc.x) / (cur.r * cur.r);
        CHECK(dp.r == doctest::Approx(rdot).epsilon(1e-11));
        CHECK(dp.theta == doctest::Approx(thdot).epsilon(1e-11));
    }
}

TEST_CASE("stage-1 ode rhs freezes the delayed state at (-delta, -delta)") {
    const ModelParams params{1.0, 5.0};
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> val(-4.0, 4.0);
    for (int k = 0; k < 50; ++k) {
        const CartesianState cur{val(gen), val(gen)};
        const CartesianState a = stage1_ode_rhs(params, cur);
        const CartesianState b = cartesian_rhs(params, cur, {-5.0, -5.0});
        CHECK(a.x == b.x);  // same code path, bit for bit
        CHECK(a.y == b.y);
    }
}

TEST_CASE("stage-1 polar rhs equals the general polar rhs at the plateau state") {
    // delayed cartesian (-delta, -delta) is polar (sqrt2*delta, -3pi/4)
    const ModelParams params{1.0, 2.5};
    const PolarState delayed{std::numbers::sqrt2 * params.delta, -3.0 * pi / 4.0};
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> rad(0.1, 6.0);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (int k = 0; k < 100; ++k) {
        const PolarState cur{rad(gen), ang(gen)};
        const PolarState a = stage1_polar_rhs(params, cur);
        const PolarState b = polar_rhs(params, cur, delayed);
        CHECK(a.r == doctest::Approx(b.r).epsilon(1e-12));
        CHECK(a.theta == doctest::Approx(b.theta).epsilon(1e-12));
    }
}

TEST_CASE("polar conversion round trip with angle unwrapping") {
    const PolarState p{1.5, 7.5};  // more than a full turn
    const CartesianState c = to_cartesian(p);
    const PolarState back = to_polar(c, 7.0);
    CHECK(back.r == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(back.theta == doctest::Approx(7.5).epsilon(1e-12));

    // hint selects the branch: same point, hint near the principal value
    const PolarState principal = to_polar(c, 1.0);
    CHECK(principal.theta == doctest::Approx(7.5 - 2.0 * pi).epsilon(1e-12));
}

TEST_CASE("polar angle is undefined at the origin") {
    CHECK_THROWS_AS((void)to_polar({0.0, 0.0}, 0.0), std::domain_error);
}

TEST_CASE("closed-form radius of the non-delay system") {
    // r0=2, t=1: 2e/sqrt(1+4(e^2-1))
    const double want = 2.0 * std::exp(1.0) / std::sqrt(1.0 + 4.0 * (std::exp(2.0) - 1.0));
    CHECK(nondelay_exact_radius(2.0, 1.0) == doctest::Approx(want).epsilon(1e-15));
    CHECK(nondelay_exact_radius(2.0, 1.0) ==
          doctest::Approx(1.0549729219451955).epsilon(1e-15));

    // the unit circle is invariant
    CHECK(nondelay_exact_radius(1.0, 17.3) == 1.0);

    // attracting from both sides, no overflow at large t
    CHECK(nondelay_exact_radius(0.1, 800.0) == doctest::Approx(1.0));
    CHECK(nondelay_exact_radius(2.0, 800.0) == doctest::Approx(1.0));
    CHECK(nondelay_exact_radius(0.1, 5.0) ==
          doctest::Approx(0.99776025072635291).epsilon(1e-15));

    // t = 0 returns the initial value exactly for representable squares
    CHECK(nondelay_exact_radius(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}
