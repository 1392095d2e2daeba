#include "ddelab/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ddelab/model.hpp"

namespace ddelab {

namespace {

// Dormand-Prince 5(4) tableau with the quartic continuous extension.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double euclidean_radius(std::span<const double> y) {
    double acc = 0.0;
    for (double x : y) acc += x * x;
    return std::sqrt(acc);
}

double error_norm(std::span<const double> err, std::span<const double> y0,
                  std::span<const double> y1, double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / sk;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

// Automatic initial step: match the scale of y'/y, then refine with one
// Euler probe of the second derivative.
double initial_step(const OdeRhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double h_cap, double atol, double rtol,
                    StepStats& stats) {
    const std::size_t n = y0.size();
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, h_cap);

    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * f0[i];
    rhs(t0 + h, y1, f1);
    ++stats.n_rhs;

    double der2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        const double q = (f1[i] - f0[i]) / sk;
        der2 += q * q;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                       : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, h_cap});
}

// Mandatory landing times inside (t0, t_end), deduplicated, plus t_end.
std::vector<double> landing_schedule(const std::vector<double>& breakpoints, double t0,
                                     double t_end) {
    constexpr double kMergeTol = 1e-12;
    std::vector<double> stops;
    stops.reserve(breakpoints.size() + 1);
    for (double b : breakpoints)
        if (b > t0 + kMergeTol && b < t_end - kMergeTol) stops.push_back(b);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end(),
                            [](double a, double b) { return b - a <= kMergeTol; }),
                stops.end());
    stops.push_back(t_end);
    return stops;
}

// Adaptive 5(4) loop appending dense segments into traj until t_end, the
// radius guard, or a failure. Assumes traj already holds the initial point.
void run_adaptive(const OdeRhs& rhs, double t_end, const IntegratorOptions& opts,
                  Trajectory& traj) {
    const std::size_t n = static_cast<std::size_t>(traj.dim());
    const double t0 = traj.t_back();
    if (!(t_end > t0))
        throw std::invalid_argument("integrate: t_end must exceed t0");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");

    constexpr double safe = 0.9, fac1 = 0.2, fac2 = 10.0, beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    const double facc1 = 1.0 / fac1, facc2 = 1.0 / fac2;

    const auto radius = opts.radius ? opts.radius
                                    : std::function<double(std::span<const double>)>(
                                          euclidean_radius);
    const std::vector<double> stops = landing_schedule(opts.breakpoints, t0, t_end);

    std::vector<double> y = traj.back_state();
    std::vector<double> ynew(n), ytmp(n), err(n), rcont(5 * n);
    std::array<std::vector<double>, 7> k;
    for (auto& ki : k) ki.resize(n);

    StepStats stats;
    RunStatus status = RunStatus::reached_end;

    rhs(t0, y, k[0]);
    ++stats.n_rhs;
    if (!all_finite(k[0])) {
        traj.set_status(RunStatus::nonfinite_derivative);
        traj.set_stats(stats);
        return;
    }

    const double h_cap = std::min(opts.h_max, t_end - t0);
    double h = opts.h_init > 0.0
                   ? std::min(opts.h_init, h_cap)
                   : initial_step(rhs, t0, y, k[0], h_cap, opts.abs_tol, opts.rel_tol,
                                  stats);

    double t = t0;
    double facold = 1e-4;
    std::size_t next_stop = 0;
    bool rejected = false;

    while (true) {
        const double stop = stops[next_stop];
        bool landing = false;
        if (t + 1.01 * h >= stop) {
            h = stop - t;
            landing = true;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
        rhs(t + c2 * h, ytmp, k[1]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        rhs(t + c3 * h, ytmp, k[2]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        rhs(t + c4 * h, ytmp, k[3]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] +
                                  a54 * k[3][i]);
        rhs(t + c5 * h, ytmp, k[4]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] +
                                  a64 * k[3][i] + a65 * k[4][i]);
        rhs(t + h, ytmp, k[5]);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] +
                                  a75 * k[4][i] + a76 * k[5][i]);
        rhs(t + h, ynew, k[6]);
        stats.n_rhs += 6;

        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                          e6 * k[5][i] + e7 * k[6][i]);
        const double errn = error_norm(err, y, ynew, opts.abs_tol, opts.rel_tol);

        if (std::isfinite(errn) && errn <= 1.0) {
            facold = std::max(errn, 1e-4);
            ++stats.n_accepted;

            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k[0][i] - ydiff;
                rcont[i] = y[i];
                rcont[n + i] = ydiff;
                rcont[2 * n + i] = bspl;
                rcont[3 * n + i] = ydiff - h * k[6][i] - bspl;
                rcont[4 * n + i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] +
                                        d5 * k[4][i] + d6 * k[5][i] + d7 * k[6][i]);
            }
            const double t_new = landing ? stop : t + h;
            traj.append_segment(t_new, rcont);
            t = t_new;
            std::swap(y, ynew);
            std::swap(k[0], k[6]);

            if (radius(y) > opts.r_max) {
                status = RunStatus::blowup_suspected;
                break;
            }
            if (landing && ++next_stop == stops.size()) {
                status = RunStatus::reached_end;
                break;
            }

            const double fac11 = std::pow(errn, expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facc2, std::min(facc1, fac / safe));
            double hnew = h / fac;
            if (rejected) hnew = std::min(hnew, h);
            h = std::min(hnew, opts.h_max);
            rejected = false;
        } else {
            if (stats.n_accepted > 0) ++stats.n_rejected;
            double hnew;
            if (std::isfinite(errn)) {
                const double fac11 = std::pow(errn, expo1);
                hnew = h / std::min(facc1, fac11 / safe);
            } else {
                hnew = 0.2 * h;
            }
            if (hnew < opts.h_min || !(hnew > 0.0)) {
                status = std::isfinite(errn) ? RunStatus::step_floor
                                             : RunStatus::nonfinite_derivative;
                break;
            }
            h = hnew;
            rejected = true;
        }
    }

    traj.set_status(status);
    traj.set_stats(stats);
}

}  // namespace

Trajectory integrate_ode(const OdeRhs& rhs, double t0, std::span<const double> y0,
                         double t_end, const IntegratorOptions& opts) {
    Trajectory traj(static_cast<int>(y0.size()), t0, y0);
    run_adaptive(rhs, t_end, opts, traj);
    return traj;
}

Trajectory integrate_dde(const DdeRhs& rhs, double lag, const HistoryFunction& history,
                         double t0, double t_end, const IntegratorOptions& opts) {
    if (!(lag > 0.0)) throw std::invalid_argument("integrate_dde: lag must be positive");
    constexpr double kAlignTol = 1e-9;
    if (std::abs(history.t_begin() - (t0 - lag)) > kAlignTol ||
        std::abs(history.t_end() - t0) > kAlignTol)
        throw std::invalid_argument("integrate_dde: history must cover [t0 - lag, t0]");

    // Every history breakpoint propagates a derivative discontinuity at each
    // multiple of the lag; those times become mandatory landings so no dense
    // segment bridges a kink. The junction at t0 itself propagates too.
    IntegratorOptions local = opts;
    const auto& hb = history.breakpoints();
    std::vector<double> bases(hb.begin() + 1, hb.end());
    for (double base : bases) {
        for (int m = 1;; ++m) {
            const double bp = base + m * lag;
            if (bp >= t_end) break;
            local.breakpoints.push_back(bp);
        }
    }

    const Vec2 y0 = history(t0);
    Trajectory traj(2, t0, std::span<const double>(y0.data(), 2));
    traj.set_prefix(history);

    std::array<double, 2> yd{};
    const OdeRhs wrapped = [&rhs, &traj, &yd, lag](double t, std::span<const double> y,
                                                   std::span<double> dydt) {
        const double td = t - lag;
        if (td > traj.span_end() + 1e-9)
            throw std::logic_error("integrate_dde: delayed time beyond built span");
        traj.eval(td, yd);
        rhs(t, y, std::span<const double>(yd.data(), 2), dydt);
    };
    run_adaptive(wrapped, t_end, local, traj);
    return traj;
}

Trajectory integrate_ode_fixed(const OdeRhs& rhs, double t0, std::span<const double> y0,
                               double t_end, int n_steps) {
    if (n_steps <= 0)
        throw std::invalid_argument("integrate_ode_fixed: need at least one step");
    if (!(t_end > t0))
        throw std::invalid_argument("integrate_ode_fixed: t_end must exceed t0");
    const std::size_t n = y0.size();
    const double h = (t_end - t0) / n_steps;

    Trajectory traj(static_cast<int>(n), t0, y0);
    std::vector<double> y(y0.begin(), y0.end());
    std::vector<double> ynew(n), ytmp(n), rcont(5 * n);
    std::array<std::vector<double>, 7> k;
    for (auto& ki : k) ki.resize(n);

    StepStats stats;
    rhs(t0, y, k[0]);
    ++stats.n_rhs;

    for (int step = 0; step < n_steps; ++step) {
        const double t = t0 + step * h;
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
        rhs(t + c2 * h, ytmp, k[1]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        rhs(t + c3 * h, ytmp, k[2]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        rhs(t + c4 * h, ytmp, k[3]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] +
                                  a54 * k[3][i]);
        rhs(t + c5 * h, ytmp, k[4]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] +
                                  a64 * k[3][i] + a65 * k[4][i]);
        rhs(t + h, ytmp, k[5]);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] +
                                  a75 * k[4][i] + a76 * k[5][i]);
        rhs(t + h, ynew, k[6]);
        stats.n_rhs += 6;
        ++stats.n_accepted;

        for (std::size_t i = 0; i < n; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k[0][i] - ydiff;
            rcont[i] = y[i];
            rcont[n + i] = ydiff;
            rcont[2 * n + i] = bspl;
            rcont[3 * n + i] = ydiff - h * k[6][i] - bspl;
            rcont[4 * n + i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] +
                                    d5 * k[4][i] + d6 * k[5][i] + d7 * k[6][i]);
        }
        const double t_new = (step + 1 == n_steps) ? t_end : t0 + (step + 1) * h;
        traj.append_segment(t_new, rcont);
        std::swap(y, ynew);
        std::swap(k[0], k[6]);
    }
    traj.set_status(RunStatus::reached_end);
    traj.set_stats(stats);
    return traj;
}

namespace {

struct StudyProblem {
    OdeRhs rhs;
    std::vector<double> y0;
    double t0 = 0.0;
    double t_end = 1.0;
    std::function<void(double, std::span<double>)> exact;
};

StudyProblem make_problem(const std::string& name) {
    if (name == "linear") {
        // y' = (x - y, x + y): exact solution e^t (cos t, sin t) from (1, 0).
        StudyProblem p;
        p.rhs = [](double, std::span<const double> y, std::span<double> dydt) {
            dydt[0] = y[0] - y[1];
            dydt[1] = y[0] + y[1];
        };
        p.y0 = {1.0, 0.0};
        p.exact = [](double t, std::span<double> out) {
            out[0] = std::exp(t) * std::cos(t);
            out[1] = std::exp(t) * std::sin(t);
        };
        return p;
    }
    if (name == "nondelay-polar") {
        StudyProblem p;
        p.rhs = [](double, std::span<const double> y, std::span<double> dydt) {
            dydt[0] = y[0] - y[0] * y[0] * y[0];
        };
        p.y0 = {2.0};
        p.exact = [](double t, std::span<double> out) {
            out[0] = nondelay_exact_radius(2.0, t);
        };
        return p;
    }
    throw std::invalid_argument("convergence_study: unknown problem '" + name + "'");
}

}  // namespace

ConvergenceReport convergence_study(const std::string& problem,
                                    std::span<const int> step_counts) {
    if (step_counts.empty())
        throw std::invalid_argument("convergence_study: need at least one step count");
    const StudyProblem p = make_problem(problem);
    const std::size_t n = p.y0.size();

    ConvergenceReport report;
    std::vector<double> got(n), want(n);
    for (int steps : step_counts) {
        const Trajectory traj =
            integrate_ode_fixed(p.rhs, p.t0, p.y0, p.t_end, steps);

        ConvergenceRow row;
        row.n_steps = steps;
        row.h = (p.t_end - p.t0) / steps;

        p.exact(p.t_end, want);
        const std::vector<double> y_end = traj.back_state();
        for (std::size_t i = 0; i < n; ++i)
            row.err_final = std::max(row.err_final, std::abs(y_end[i] - want[i]));

        // Sample the interpolant away from the step grid: 64 points at an
        // irrational phase so none coincides with a knot for any step count.
        constexpr int kSamples = 64;
        for (int j = 0; j < kSamples; ++j) {
            const double u = (j + 0.5 + 0.1 * std::numbers::pi) / (kSamples + 1);
            const double t = p.t0 + u * (p.t_end - p.t0);
            traj.eval(t, got);
            p.exact(t, want);
            for (std::size_t i = 0; i < n; ++i)
                row.err_dense = std::max(row.err_dense, std::abs(got[i] - want[i]));
        }
        report.rows.push_back(row);
    }

    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& prev = report.rows[i - 1];
        const auto& cur = report.rows[i];
        const double dh = std::log(prev.h / cur.h);
        report.orders_final.push_back(std::log(prev.err_final / cur.err_final) / dh);
        report.orders_dense.push_back(std::log(prev.err_dense / cur.err_dense) / dh);
    }
    return report;
}

}  // namespace ddelab
