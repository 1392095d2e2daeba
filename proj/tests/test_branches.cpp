#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "ddelab/branches.hpp"

using namespace ddelab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("branch delay function and its derivative") {
    CHECK(k_n(1.0, 0) == 0.0);
    CHECK(std::abs(k_n(2.0, 1) - (std::atan(1.0) + 2.0 * pi) / 2.0) < 1e-16);
    // defining identity at scattered frequencies
    for (double w : {0.3, 1.7, -2.4, 9.1}) {
        for (int n : {-2, 0, 3}) {
            CHECK(std::abs(w * k_n(w, n) - std::atan(w - 1.0) - 2.0 * n * pi) < 1e-12);
        }
    }
    CHECK_THROWS_AS((void)k_n(0.0, 1), std::domain_error);
    CHECK_THROWS_AS((void)k0_prime(0.0), std::domain_error);

    // derivative against central differences
    for (double w : {1.5, 2.23, 4.0, -3.0}) {
        const double h = 1e-5;
        const double fd = (k_n(w + h, 0) - k_n(w - h, 0)) / (2.0 * h);
        CHECK(std::abs(k0_prime(w) - fd) < 1e-8);
    }
}

TEST_CASE("radius pairing") {
    CHECK(radius_from_omega(1.0) == 1.0);
    for (double w : {0.2, 1.0, 3.7, -5.0}) {
        const double r = radius_from_omega(w);
        CHECK(r >= 1.0);
        CHECK(std::abs(r * r * r * r - (w * w - 2.0 * w + 2.0)) < 1e-12);
    }
}

TEST_CASE("single-root branches at unit delay") {
    const auto pts = solve_branch(1.0, 1);
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].omega - 7.7059511843459966) < 1e-12);
    const EquilibriumResidual res = equilibrium_residual(pts[0]);
    CHECK(std::abs(res.res1) < 1e-12);
    CHECK(std::abs(res.res2) < 1e-12);
    CHECK(pts[0].n == 1);
    // the frequency window that defines the branch index
    CHECK(std::abs(pts[0].omega * 1.0 - 2.0 * pi) < pi / 2.0);

    const auto neg = solve_branch(1.0, -1);
    REQUIRE(neg.size() == 1);
    CHECK(neg[0].omega < 0.0);
    CHECK(std::abs(neg[0].omega * 1.0 + 2.0 * pi) < pi / 2.0);
    const EquilibriumResidual nres = equilibrium_residual(neg[0]);
    CHECK(std::abs(nres.res1) < 1e-12);
    CHECK(std::abs(nres.res2) < 1e-12);
}

TEST_CASE("branch zero holds three roots below the fold delay") {
    const auto pts = solve_branch(0.2, 0);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].omega < pts[1].omega);
    CHECK(pts[1].omega < pts[2].omega);
    CHECK(std::abs(pts[0].omega - (-7.2509306618150382)) < 1e-11);
    CHECK(std::abs(pts[1].omega - 1.2567886843052982) < 1e-12);
    CHECK(std::abs(pts[2].omega - 7.0326236464740869) < 1e-11);
    CHECK(std::abs(pts[1].r - 1.0160924714456035) < 1e-12);
    for (const auto& p : pts) {
        const EquilibriumResidual res = equilibrium_residual(p);
        CHECK(std::abs(res.res1) < 1e-12);
        CHECK(std::abs(res.res2) < 1e-12);
    }

    // above the fold only the negative root survives
    const auto above = solve_branch(0.41, 0);
    REQUIRE(above.size() == 1);
    CHECK(above[0].omega < 0.0);
    // just below it all three are still there
    CHECK(solve_branch(0.39, 0).size() == 3);

    CHECK_THROWS_AS((void)solve_branch(0.0, 0), std::invalid_argument);
}

TEST_CASE("equilibrium enumeration") {
    const auto pts = enumerate_equilibria(1.0, 3);
    REQUIRE(pts.size() == 7);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1].omega < pts[i].omega);
    for (const auto& p : pts) {
        const EquilibriumResidual res = equilibrium_residual(p);
        CHECK(std::abs(res.res1) < 1e-10);
        CHECK(std::abs(res.res2) < 1e-10);
        CHECK(p.tau == 1.0);
    }
    CHECK_THROWS_AS((void)enumerate_equilibria(-1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)enumerate_equilibria(1.0, -1), std::invalid_argument);
}

TEST_CASE("fold of branch zero") {
    const BranchFold fold = k0_maximum();
    CHECK(std::abs(fold.omega_star - 2.2291336422217749) < 1e-9);
    CHECK(std::abs(fold.tau_star - 0.39828426936099396) < 1e-10);
    CHECK(fold.omega_star > 2.0);
    CHECK(fold.omega_star < 3.0);
    CHECK(std::abs(k0_prime(fold.omega_star)) < 1e-10);
    const double r = radius_from_omega(fold.omega_star);
    CHECK(std::abs(r * r * r * r * fold.tau_star - 1.0) < 1e-8);
}

TEST_CASE("bifurcation diagram sampling") {
    const auto branches = bifurcation_diagram(0.05, 2.0, -2, 2, 100);
    int zero_pieces = 0;
    bool has_positive_zero_piece = false;
    for (const auto& b : branches) {
        REQUIRE(!b.points.empty());
        for (const auto& p : b.points) {
            CHECK(p.tau >= 0.05 - 1e-12);
            CHECK(p.tau <= 2.0 + 1e-12);
            CHECK(p.tau == k_n(p.omega, b.n));  // parametric construction is exact
            CHECK(std::abs(p.r - radius_from_omega(p.omega)) == 0.0);
        }
        if (b.n == 0) {
            ++zero_pieces;
            if (b.points.front().omega > 0.0) has_positive_zero_piece = true;
        }
    }
    CHECK(zero_pieces == 2);
    CHECK(has_positive_zero_piece);

    // the positive piece passes close to the fold where r^4 tau = 1
    double best = 1e300;
    for (const auto& b : branches) {
        if (b.n != 0) continue;
        for (const auto& p : b.points) {
            if (p.omega <= 0.0) continue;
            const double r4t = p.r * p.r * p.r * p.r * p.tau;
            best = std::min(best, std::abs(r4t - 1.0));
        }
    }
    CHECK(best < 0.02);

    CHECK_THROWS_AS((void)bifurcation_diagram(2.0, 1.0, -2, 2, 100), std::invalid_argument);
    CHECK_THROWS_AS((void)bifurcation_diagram(0.1, 1.0, 2, -2, 100), std::invalid_argument);
    CHECK_THROWS_AS((void)bifurcation_diagram(0.1, 1.0, -2, 2, 1), std::invalid_argument);
}

TEST_CASE("periodic seed history matches the rotating solution") {
    EquilibriumPoint point;
    point.n = 0;
    point.omega = 1.2567886843052982;
    point.r = 1.0160924714456035;
    point.tau = 0.2;
    const HistoryFunction h = periodic_seed_history(point);
    CHECK(h.t_begin() == -0.2);
    CHECK(h.t_end() == 0.0);
    const Vec2 at0 = h(0.0);
    CHECK(at0[0] == point.r);
    CHECK(at0[1] == 0.0);
    const Vec2 atm = h(-0.2);
    CHECK(atm[0] == point.r);
    CHECK(std::abs(atm[1] - (-point.omega * 0.2)) < 1e-15);
    const Vec2 mid = h(-0.1);
    CHECK(std::abs(mid[1] - (-point.omega * 0.1)) < 1e-15);

    EquilibriumPoint bad;
    bad.r = -1.0;
    CHECK_THROWS_AS((void)periodic_seed_history(bad), std::invalid_argument);
}
