#include "ddelab/branches.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace ddelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWindowMargin = 1e-9;

// Bisection to floating-point exhaustion: stops when the midpoint can no
// longer be distinguished from an endpoint. g(lo) and g(hi) must differ
// in sign.
double bisect_to_ulp(const std::function<double(double)>& g, double lo, double hi,
                     double glo) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
        const double gmid = g(mid);
        if (gmid == 0.0) return mid;
        if ((glo < 0.0) == (gmid < 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// A couple of guarded secant iterations to polish a bisected root.
double secant_polish(const std::function<double(double)>& g, double x0, double x1) {
    double g0 = g(x0), g1 = g(x1);
    for (int i = 0; i < 2; ++i) {
        const double denom = g1 - g0;
        if (denom == 0.0) break;
        const double x2 = x1 - g1 * (x1 - x0) / denom;
        if (!std::isfinite(x2)) break;
        const double g2 = g(x2);
        if (std::abs(g2) >= std::abs(g1)) break;
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g2;
    }
    return x1;
}

bool inside_window(double omega, double tau, int n) {
    const double w = omega * tau - 2.0 * n * kPi;
    return std::abs(w) < kPi / 2.0 - kWindowMargin;
}

EquilibriumPoint make_point(double omega, double tau, int n) {
    return {n, omega, radius_from_omega(omega), tau};
}

// Root of k_n - tau inside [lo, hi]; endpoints must bracket.
double refine_root(double tau, int n, double lo, double hi, double glo) {
    const auto g = [tau, n](double w) { return k_n(w, n) - tau; };
    const double root = bisect_to_ulp(g, lo, hi, glo);
    const double step = std::max(std::abs(root) * 1e-9, 1e-12);
    return secant_polish(g, root - step, root);
}

// Sign-change scan of k_0 - tau over a log-spaced grid on one sign of
// omega (sign = +1 or -1), appending refined roots.
void scan_branch0(double tau, int sign, std::vector<EquilibriumPoint>& out) {
    constexpr int kNodes = 10000;
    constexpr double kLo = 1e-6, kHi = 1e6;
    const double ratio = std::log(kHi / kLo);
    double prev_w = sign * kLo;
    double prev_g = k_n(prev_w, 0) - tau;
    if (prev_g == 0.0 && inside_window(prev_w, tau, 0)) out.push_back(make_point(prev_w, tau, 0));
    for (int i = 1; i < kNodes; ++i) {
        const double w = sign * kLo * std::exp(ratio * i / (kNodes - 1));
        const double g = k_n(w, 0) - tau;
        if (g == 0.0) {
            if (inside_window(w, tau, 0)) out.push_back(make_point(w, tau, 0));
        } else if ((prev_g < 0.0) != (g < 0.0) && prev_g != 0.0) {
            const double lo = std::min(prev_w, w), hi = std::max(prev_w, w);
            const double glo = (lo == prev_w) ? prev_g : g;
            const double root = refine_root(tau, 0, lo, hi, glo);
            if (inside_window(root, tau, 0)) out.push_back(make_point(root, tau, 0));
        }
        prev_w = w;
        prev_g = g;
    }
}

}  // namespace

double k_n(double omega, int n) {
    if (omega == 0.0) throw std::domain_error("k_n: omega must be nonzero");
    return (std::atan(omega - 1.0) + 2.0 * n * kPi) / omega;
}

double radius_from_omega(double omega) {
    const double w1 = omega - 1.0;
    return std::sqrt(std::sqrt(w1 * w1 + 1.0));
}

double k0_prime(double omega) {
    if (omega == 0.0) throw std::domain_error("k0_prime: omega must be nonzero");
    const double w1 = omega - 1.0;
    return (1.0 / (1.0 + w1 * w1) - std::atan(w1) / omega) / omega;
}

EquilibriumResidual equilibrium_residual(const EquilibriumPoint& point) {
    const double r2 = point.r * point.r;
    const double wt = point.omega * point.tau;
    return {1.0 - r2 * std::cos(wt), point.omega - 1.0 - r2 * std::sin(wt)};
}

std::vector<EquilibriumPoint> solve_branch(double tau, int n) {
    if (!(tau > 0.0)) throw std::invalid_argument("solve_branch: tau must be positive");
    std::vector<EquilibriumPoint> out;

    if (n >= 1) {
        // k_n decreases from +inf (omega -> 0+) to 0 (omega -> +inf).
        double lo = 1e-12;
        double hi = std::max(1.0, 4.0 * n * kPi / tau);
        while (k_n(hi, n) > tau) hi *= 2.0;
        const double root = refine_root(tau, n, lo, hi, k_n(lo, n) - tau);
        if (inside_window(root, tau, n)) out.push_back(make_point(root, tau, n));
    } else if (n <= -1) {
        // k_n increases from 0 (omega -> -inf) to +inf (omega -> 0-).
        double lo = std::min(-1.0, 4.0 * n * kPi / tau);
        while (k_n(lo, n) > tau) lo *= 2.0;
        double hi = -1e-12;
        const double root = refine_root(tau, n, lo, hi, k_n(lo, n) - tau);
        if (inside_window(root, tau, n)) out.push_back(make_point(root, tau, n));
    } else {
        scan_branch0(tau, -1, out);
        scan_branch0(tau, +1, out);
    }
    std::sort(out.begin(), out.end(),
              [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
                  return a.omega < b.omega;
              });
    return out;
}

std::vector<EquilibriumPoint> enumerate_equilibria(double tau, int n_max) {
    if (!(tau > 0.0))
        throw std::invalid_argument("enumerate_equilibria: tau must be positive");
    if (n_max < 0)
        throw std::invalid_argument("enumerate_equilibria: n_max must be nonnegative");
    std::vector<EquilibriumPoint> all;
    for (int n = -n_max; n <= n_max; ++n) {
        const std::vector<EquilibriumPoint> pts = solve_branch(tau, n);
        all.insert(all.end(), pts.begin(), pts.end());
    }
    std::sort(all.begin(), all.end(),
              [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
                  return a.omega < b.omega;
              });
    return all;
}

BranchFold k0_maximum() {
    double lo = 2.0, hi = 3.0;
    double glo = k0_prime(lo);
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double gmid = k0_prime(mid);
        if (gmid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((glo < 0.0) == (gmid < 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
        }
    }
    BranchFold fold;
    fold.omega_star = 0.5 * (lo + hi);
    fold.tau_star = k_n(fold.omega_star, 0);
    return fold;
}

namespace {

// omega at which k_n equals tau, restricted to one monotone side.
// side > 0: omega > 0 (k decreasing); side < 0: omega < 0 (k increasing).
// For n = 0, monotone_root is only called with ranges that avoid the fold.
double monotone_root(double tau, int n, int side) {
    if (side > 0) {
        double lo = 1e-9;
        double hi = std::max(1.0, 4.0 * (std::abs(n) + 1) * kPi / tau);
        while (k_n(hi, n) > tau) hi *= 2.0;
        return refine_root(tau, n, lo, hi, k_n(lo, n) - tau);
    }
    double lo = std::min(-1.0, -4.0 * (std::abs(n) + 1) * kPi / tau);
    while (k_n(lo, n) > tau) lo *= 2.0;
    return refine_root(tau, n, lo, -1e-9, k_n(lo, n) - tau);
}

BranchSample sample_piece(int n, double w_lo, double w_hi, int samples,
                          double tau_min, double tau_max) {
    BranchSample branch;
    branch.n = n;
    if (!(w_hi > w_lo) || samples < 2) return branch;
    // Log-spaced in |omega| so the tau axis is covered evenly; both
    // endpoints are on the same sign by construction.
    const double sign = (w_lo > 0.0) ? 1.0 : -1.0;
    const double a = std::log(std::abs(sign > 0 ? w_lo : w_hi));
    const double b = std::log(std::abs(sign > 0 ? w_hi : w_lo));
    for (int i = 0; i < samples; ++i) {
        const double u = a + (b - a) * i / (samples - 1);
        const double omega = sign * std::exp(u);
        const double tau = k_n(omega, n);
        if (tau < tau_min - 1e-12 || tau > tau_max + 1e-12) continue;
        branch.points.push_back({tau, omega, radius_from_omega(omega)});
    }
    std::sort(branch.points.begin(), branch.points.end(),
              [](const BranchSample::Point& p, const BranchSample::Point& q) {
                  return p.omega < q.omega;
              });
    return branch;
}

}  // namespace

std::vector<BranchSample> bifurcation_diagram(double tau_min, double tau_max,
                                              int n_min, int n_max, int samples) {
    if (!(tau_min > 0.0) || !(tau_max > tau_min))
        throw std::invalid_argument("bifurcation_diagram: need 0 < tau_min < tau_max");
    if (n_min > n_max)
        throw std::invalid_argument("bifurcation_diagram: empty branch range");
    if (samples < 2)
        throw std::invalid_argument("bifurcation_diagram: need at least 2 samples");

    std::vector<BranchSample> branches;
    for (int n = n_min; n <= n_max; ++n) {
        if (n >= 1) {
            // Decreasing on omega > 0: tau_max is met at the small end.
            const double w_lo = monotone_root(tau_max, n, +1);
            const double w_hi = monotone_root(tau_min, n, +1);
            BranchSample b = sample_piece(n, w_lo, w_hi, samples, tau_min, tau_max);
            if (!b.points.empty()) branches.push_back(std::move(b));
        } else if (n <= -1) {
            // Increasing on omega < 0: tau_min is met at the far-negative end.
            const double w_lo = monotone_root(tau_min, n, -1);
            const double w_hi = monotone_root(tau_max, n, -1);
            BranchSample b = sample_piece(n, w_lo, w_hi, samples, tau_min, tau_max);
            if (!b.points.empty()) branches.push_back(std::move(b));
        } else {
            // Negative piece rises toward omega -> 0-.
            const double w_lo = monotone_root(tau_min, 0, -1);
            const double w_hi = monotone_root(tau_max, 0, -1);
            BranchSample neg = sample_piece(0, w_lo, w_hi, samples, tau_min, tau_max);
            if (!neg.points.empty()) branches.push_back(std::move(neg));

            // Positive piece: from the ascending tau_min root through the
            // fold and back down to the descending tau_min root; points
            // with tau above tau_max are filtered inside sample_piece.
            const BranchFold fold = k0_maximum();
            if (tau_min < fold.tau_star) {
                const double asc = refine_root(tau_min, 0, 1e-9, fold.omega_star,
                                               k_n(1e-9, 0) - tau_min);
                double hi = fold.omega_star;
                while (k_n(hi, 0) > tau_min) hi *= 2.0;
                const double desc = refine_root(tau_min, 0, fold.omega_star, hi,
                                                k_n(fold.omega_star, 0) - tau_min);
                BranchSample pos =
                    sample_piece(0, asc, desc, samples, tau_min, tau_max);
                if (!pos.points.empty()) branches.push_back(std::move(pos));
            }
        }
    }
    return branches;
}

HistoryFunction periodic_seed_history(const EquilibriumPoint& point) {
    if (!(point.tau > 0.0) || !(point.r > 0.0))
        throw std::invalid_argument("periodic_seed_history: invalid equilibrium");
    const double r = point.r;
    const double omega = point.omega;
    return HistoryFunction({-point.tau, 0.0},
                           {[r, omega](double t) { return Vec2{r, omega * t}; }});
}

}  // namespace ddelab
