#pragma once

#include <vector>

#include "ddelab/history.hpp"

namespace ddelab {

/// Delay at which branch n carries an equilibrium with frequency omega:
///   k_n(omega) = (arctan(omega - 1) + 2 n pi) / omega.
/// Throws std::domain_error at omega = 0.
double k_n(double omega, int n);

/// Radius paired with frequency omega: (omega^2 - 2 omega + 2)^(1/4).
/// Always >= 1; equals 1 exactly at omega = 1.
double radius_from_omega(double omega);

/// Derivative of k_0:
///   k_0'(omega) = (1/omega) (1/(1+(omega-1)^2) - arctan(omega-1)/omega).
/// Throws std::domain_error at omega = 0.
double k0_prime(double omega);

/// A constant-radius rotating solution: r(t) = r, theta(t) = omega t + c.
struct EquilibriumPoint {
    int n = 0;        // branch index: omega*tau lies in (-pi/2, pi/2) + 2 n pi
    double omega = 0.0;
    double r = 0.0;
    double tau = 0.0;

    /// Reported with every point; the branch fold satisfies r^4 tau = 1.
    double r4tau() const { return r * r * r * r * tau; }
};

/// Residuals of the defining equations: (1 - r^2 cos(omega tau),
/// omega - 1 - r^2 sin(omega tau)). Both vanish at a true equilibrium.
struct EquilibriumResidual {
    double res1 = 0.0;
    double res2 = 0.0;
};

EquilibriumResidual equilibrium_residual(const EquilibriumPoint& point);

/// All frequencies omega with k_n(omega) = tau and omega tau inside the
/// n-th window. Branches n >= 1 have exactly one root (omega > 0,
/// k_n decreasing), branches n <= -1 exactly one (omega < 0, k_n
/// increasing). Branch 0 is scanned on both signs of omega over a log
/// grid and can hold up to three roots (one negative, at most two
/// positive below the fold). Roots are bisected to machine precision
/// and polished with secant steps; result sorted by omega.
std::vector<EquilibriumPoint> solve_branch(double tau, int n);

/// Union of solve_branch over |n| <= n_max, sorted by omega.
std::vector<EquilibriumPoint> enumerate_equilibria(double tau, int n_max);

struct BranchFold {
    double omega_star = 0.0;
    double tau_star = 0.0;
};

/// The unique maximum of k_0 on omega > 1, located by bisecting k_0'
/// on (2, 3) to 1e-12. At the maximum r^4 tau = 1 holds.
BranchFold k0_maximum();

struct BranchSample {
    int n = 0;
    struct Point {
        double tau = 0.0;
        double omega = 0.0;
        double r = 0.0;
    };
    std::vector<Point> points;
};

/// Branches sampled parametrically in omega (tau = k_n(omega) exactly),
/// restricted to tau in [tau_min, tau_max]. Branch 0 appears as two
/// pieces (omega < 0 and omega > 0) when both fall in range, labeled by
/// the same index.
std::vector<BranchSample> bifurcation_diagram(double tau_min, double tau_max,
                                              int n_min, int n_max, int samples);

/// Polar history seeding the periodic solution at an equilibrium:
/// r(t) = r, theta(t) = omega t on [-tau, 0], angle unwrapped.
HistoryFunction periodic_seed_history(const EquilibriumPoint& point);

}  // namespace ddelab
