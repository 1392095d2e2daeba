#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "ddelab/history.hpp"
#include "ddelab/model.hpp"

using namespace ddelab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("ramp history: plateau, climb, endpoint values") {
    const ModelParams params{2.0, 3.0};
    const HistoryFunction h = theorem1_history(params, linear_phi_tilde(params));

    CHECK(h.t_begin() == -2.0);
    CHECK(h.t_end() == 0.0);
    REQUIRE(h.breakpoints().size() == 3);
    CHECK(h.breakpoints()[1] == -1.0);

    // first component: plateau -delta then the linear climb to zero
    CHECK(h(-2.0)[0] == -3.0);
    CHECK(h(-1.5)[0] == -3.0);
    CHECK(h(-1.0)[0] == -3.0);
    CHECK(h(-0.5)[0] == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(h(0.0)[0] == 0.0);

    // second component: -delta throughout
    for (double t : {-2.0, -1.3, -0.7, 0.0}) CHECK(h(t)[1] == -3.0);

    // the ramp is continuous across the interior breakpoint
    CHECK(h.max_breakpoint_jump() < 1e-12);
}

TEST_CASE("history endpoint conditions are enforced") {
    const ModelParams params{1.0, 2.0};
    // climb that misses phi_tilde(0) = 0
    CHECK_THROWS_AS((void)theorem1_history(params, [](double) { return 1.0; }),
                    std::invalid_argument);
    // climb that misses phi_tilde(-tau/2) = -delta
    CHECK_THROWS_AS((void)theorem1_history(params, [](double t) { return t; }),
                    std::invalid_argument);
}

TEST_CASE("polar ramp history matches the cartesian one") {
    const ModelParams params{1.0, 4.0};
    const HistoryFunction cart = theorem1_history(params, linear_phi_tilde(params));
    const HistoryFunction polar = theorem1_polar_history(params, linear_phi_tilde(params));

    CHECK(polar(0.0)[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(polar(0.0)[1] == doctest::Approx(-pi / 2.0).epsilon(1e-15));

    for (double t : {-1.0, -0.8, -0.5, -0.25, -0.1, -1e-6}) {
        const Vec2 c = cart(t);
        const Vec2 p = polar(t);
        CHECK(p[0] * std::cos(p[1]) == doctest::Approx(c[0]).epsilon(1e-12));
        CHECK(p[0] * std::sin(p[1]) == doctest::Approx(c[1]).epsilon(1e-12));
        // unwrapped branch stays in the third-quadrant window
        CHECK(p[1] >= -3.0 * pi / 4.0 - 1e-12);
        CHECK(p[1] <= -pi / 2.0 + 1e-12);
    }
}

TEST_CASE("constant history evaluates everywhere on its span") {
    const HistoryFunction h = constant_history(0.5, {1.25, -0.75});
    CHECK(h.t_begin() == -0.5);
    CHECK(h(-0.5)[0] == 1.25);
    CHECK(h(-0.21)[1] == -0.75);
    CHECK(h(0.0)[0] == 1.25);
}

TEST_CASE("evaluation outside the span is rejected, with endpoint slack") {
    const HistoryFunction h = constant_history(1.0, {0.0, 0.0});
    CHECK_THROWS_AS((void)h(0.1), std::out_of_range);
    CHECK_THROWS_AS((void)h(-1.1), std::out_of_range);
    // tiny numerical overshoot at the ends is clamped, not rejected
    CHECK_NOTHROW((void)h(1e-10));
    CHECK_NOTHROW((void)h(-1.0 - 1e-10));
}

TEST_CASE("breakpoint jump is measured across discontinuous pieces") {
    const HistoryFunction h(
        {-1.0, -0.5, 0.0},
        {[](double) { return Vec2{1.0, 0.0}; }, [](double) { return Vec2{3.0, 0.0}; }});
    CHECK(h.max_breakpoint_jump() == doctest::Approx(2.0).epsilon(1e-15));
}
