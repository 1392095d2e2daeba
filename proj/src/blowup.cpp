#include "ddelab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ddelab {

namespace {

constexpr double kPi = std::numbers::pi;

double state_norm(std::span<const double> y) {
    double acc = 0.0;
    for (double v : y) acc += v * v;
    return std::sqrt(acc);
}

double wrapped_angle(std::span<const double> y) { return std::atan2(y[1], y[0]); }

}  // namespace

double alpha_constant() {
    const double s2 = std::numbers::sqrt2;
    return std::pow((2.0 - s2) / (2.0 + s2), 1.0 / (2.0 * s2));
}

ThetaEquilibria theta_equilibria(double delta, double r) {
    if (!(delta > 0.0) || !(r > 0.0))
        throw std::invalid_argument("theta_equilibria: delta and r must be positive");
    ThetaEquilibria eq;
    const double u = 1.0 / (std::numbers::sqrt2 * delta * r);
    if (u >= 1.0) return eq;
    const double a = std::asin(u);
    eq.exists = true;
    eq.theta_s = kPi / 4.0 + a;
    eq.theta_u = 5.0 * kPi / 4.0 - a;
    return eq;
}

const char* to_string(Classification kind) {
    switch (kind) {
        case Classification::blow_up: return "blow-up";
        case Classification::bounded: return "bounded";
        case Classification::horizon_reached: return "horizon-reached";
    }
    return "unknown";
}

Trajectory run_ramp_setup(const ModelParams& params, double t_horizon,
                          IntegratorOptions opts) {
    if (!(params.tau > 0.0))
        throw std::invalid_argument("run_ramp_setup: tau must be positive");
    if (!(params.delta > 0.0))
        throw std::invalid_argument("run_ramp_setup: delta must be positive");
    const HistoryFunction history =
        theorem1_history(params, linear_phi_tilde(params));
    const DdeRhs rhs = [params](double, std::span<const double> y,
                                std::span<const double> yd, std::span<double> dydt) {
        const CartesianState d =
            cartesian_rhs(params, {y[0], y[1]}, {yd[0], yd[1]});
        dydt[0] = d.x;
        dydt[1] = d.y;
    };
    return integrate_dde(rhs, params.tau, history, 0.0, t_horizon, opts);
}

BlowupEstimate estimate_blowup_fit(const Trajectory& traj, double r_max,
                                   const RadiusFn& radius) {
    const auto norm = radius ? radius : RadiusFn(state_norm);
    const auto& knots = traj.knots();
    std::vector<double> ts, us;
    std::vector<double> state(static_cast<std::size_t>(traj.dim()));
    for (std::size_t i = knots.size(); i-- > 0;) {
        traj.eval(knots[i], state);
        const double r = norm(state);
        if (r > r_max) continue;       // guard overshoot at the very end
        if (r < r_max / 100.0) break;  // below the asymptotic window
        ts.push_back(knots[i]);
        us.push_back(1.0 / r);
    }
    if (ts.size() < 4) throw std::runtime_error("insufficient tail data");
    std::reverse(ts.begin(), ts.end());
    std::reverse(us.begin(), us.end());

    const std::size_t n = ts.size();
    double t_mean = 0.0, u_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += ts[i];
        u_mean += us[i];
    }
    t_mean /= static_cast<double>(n);
    u_mean /= static_cast<double>(n);
    double stt = 0.0, stu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = ts[i] - t_mean;
        stt += dt * dt;
        stu += dt * (us[i] - u_mean);
    }
    const double slope = stu / stt;
    if (!(slope < 0.0)) throw std::runtime_error("tail radius not diverging");

    BlowupEstimate est;
    est.n_points = static_cast<int>(n);
    est.T_est = std::max(t_mean - u_mean / slope, traj.t_back());
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = us[i] - (u_mean + slope * (ts[i] - t_mean));
        ss += resid * resid;
    }
    est.rms_residual = std::sqrt(ss / static_cast<double>(n));
    return est;
}

double estimate_blowup_time(const Trajectory& traj, double r_max, const RadiusFn& radius) {
    return estimate_blowup_fit(traj, r_max, radius).T_est;
}

BlowupReport classify_run(const Trajectory& traj, double r_max, double tail_window,
                          const RadiusFn& radius) {
    const auto norm = radius ? radius : RadiusFn(state_norm);
    BlowupReport report;
    report.status = traj.status();
    report.t_stop = traj.t_back();
    report.r_last = norm(traj.back_state());

    if (traj.status() == RunStatus::blowup_suspected) {
        report.classification = Classification::blow_up;
        try {
            const BlowupEstimate est = estimate_blowup_fit(traj, r_max, radius);
            report.T_est = est.T_est;
            report.extrapolation_points = est.n_points;
        } catch (const std::runtime_error&) {
            report.T_est = report.t_stop;
            report.extrapolation_points = 0;
        }
        return report;
    }
    if (traj.status() == RunStatus::reached_end) {
        const double window_start = traj.t_back() - tail_window;
        double r_peak = 0.0;
        std::vector<double> state(static_cast<std::size_t>(traj.dim()));
        for (double t : traj.knots()) {
            if (t < window_start) continue;
            traj.eval(t, state);
            r_peak = std::max(r_peak, norm(state));
        }
        report.classification = (r_peak < r_max / 10.0) ? Classification::bounded
                                                        : Classification::horizon_reached;
        return report;
    }
    report.classification = Classification::horizon_reached;
    return report;
}

BlowupReport classify_run(const ModelParams& params, double t_horizon,
                          const IntegratorOptions& opts) {
    const Trajectory traj = run_ramp_setup(params, t_horizon, opts);
    return classify_run(traj, opts.r_max);
}

std::vector<PolarState> polar_samples(const Trajectory& traj,
                                      std::span<const double> times,
                                      double theta_hint) {
    std::vector<PolarState> out;
    out.reserve(times.size());
    std::vector<double> state(static_cast<std::size_t>(traj.dim()));
    double hint = theta_hint;
    for (double t : times) {
        traj.eval(t, state);
        if (std::isnan(hint)) hint = wrapped_angle(state);
        const PolarState p = to_polar({state[0], state[1]}, hint);
        hint = p.theta;
        out.push_back(p);
    }
    return out;
}

BoundsReport verify_theorem1_bounds(const ModelParams& params, double t_horizon,
                                    const IntegratorOptions& opts) {
    BoundsReport report;
    report.delta = params.delta;
    report.tau = params.tau;
    report.tau_prime = params.tau_prime();
    report.alpha_delta = alpha_constant() * params.delta;

    const Trajectory traj = run_ramp_setup(params, t_horizon, opts);
    const BlowupReport run = classify_run(traj, opts.r_max);
    report.classification = run.classification;
    report.T_est = run.T_est;
    report.t_stop = run.t_stop;
    report.r_last = run.r_last;

    const EventSpec quarter{
        [](double, std::span<const double> y) { return wrapped_angle(y) + kPi / 4.0; },
        CrossingDirection::rising, "theta crosses -pi/4"};
    const EventSpec zero{
        [](double, std::span<const double> y) { return wrapped_angle(y); },
        CrossingDirection::rising, "theta crosses 0"};

    report.t_quarter = find_event(traj, quarter, 0.0);
    if (report.t_quarter) {
        const std::vector<double> yq = traj.eval(*report.t_quarter);
        report.r_at_quarter = state_norm(yq);
        report.t_zero = find_event(traj, zero, *report.t_quarter);
    }

    const double tp = report.tau_prime;
    auto add_check = [&report](const std::string& name, bool applicable, bool passed,
                               double lhs, double rhs) {
        report.checks.push_back({name, applicable, applicable && passed, lhs, rhs});
    };

    add_check("quarter-angle-time", report.t_quarter.has_value(),
              report.t_quarter.value_or(0.0) <= tp / 2.0,
              report.t_quarter.value_or(0.0), tp / 2.0);
    add_check("radius-lower-bound", report.r_at_quarter.has_value(),
              report.r_at_quarter.value_or(0.0) >= report.alpha_delta,
              report.r_at_quarter.value_or(0.0), report.alpha_delta);
    const bool gap_ok = report.t_quarter && report.t_zero;
    add_check("zero-angle-gap", gap_ok,
              gap_ok && *report.t_zero - *report.t_quarter <= tp / 4.0,
              gap_ok ? *report.t_zero - *report.t_quarter : 0.0, tp / 4.0);
    const bool blew_up = report.classification == Classification::blow_up &&
                         report.T_est.has_value();
    add_check("blowup-before-half-lag", blew_up,
              report.T_est.value_or(0.0) < tp, report.T_est.value_or(0.0), tp);

    // theta stays below the stable angular branch wherever that branch
    // exists, sampled at every knot from the -pi/4 crossing onward.
    bool branch_applicable = false;
    double worst_margin = -std::numeric_limits<double>::infinity();
    if (report.t_quarter) {
        std::vector<double> times{*report.t_quarter};
        for (double t : traj.knots())
            if (t > *report.t_quarter) times.push_back(t);
        const std::vector<PolarState> samples =
            polar_samples(traj, times, -kPi / 4.0);
        for (const PolarState& p : samples) {
            const ThetaEquilibria eq = theta_equilibria(params.delta, p.r);
            if (!eq.exists) continue;
            branch_applicable = true;
            worst_margin = std::max(worst_margin, p.theta - eq.theta_s);
        }
    }
    add_check("angle-below-stable-branch", branch_applicable, worst_margin < 0.0,
              branch_applicable ? worst_margin : 0.0, 0.0);

    bool pole_applicable = false;
    double pole_bound = 0.0;
    if (blew_up && report.t_zero) {
        const std::vector<double> yz = traj.eval(*report.t_zero);
        pole_bound = *report.t_zero + 1.0 / (params.delta * state_norm(yz)) + 1e-3;
        pole_applicable = true;
    }
    add_check("pole-time-upper-bound", pole_applicable,
              report.T_est.value_or(0.0) <= pole_bound, report.T_est.value_or(0.0),
              pole_bound);

    report.all_passed =
        std::all_of(report.checks.begin(), report.checks.end(),
                    [](const CheckResult& c) { return c.applicable && c.passed; });
    return report;
}

ThresholdResult threshold_search(double tau, double delta_lo, double delta_hi,
                                 double tol, double t_horizon,
                                 const IntegratorOptions& opts) {
    if (!(tau > 0.0))
        throw std::invalid_argument("threshold_search: tau must be positive");
    if (!(delta_lo > 0.0) || !(delta_hi > delta_lo))
        throw std::invalid_argument("threshold_search: need 0 < delta_lo < delta_hi");
    if (!(tol > 0.0))
        throw std::invalid_argument("threshold_search: tolerance must be positive");

    ThresholdResult result;
    auto probe = [&](double delta) {
        const BlowupReport r = classify_run({tau, delta}, t_horizon, opts);
        result.probes.push_back({delta, r.classification});
        return r.classification;
    };

    const Classification lo_kind = probe(delta_lo);
    if (lo_kind != Classification::bounded)
        throw std::runtime_error(std::string("bracket invalid: lower endpoint is ") +
                                 to_string(lo_kind));
    const Classification hi_kind = probe(delta_hi);
    if (hi_kind != Classification::blow_up)
        throw std::runtime_error(std::string("bracket invalid: upper endpoint is ") +
                                 to_string(hi_kind));

    double lo = delta_lo, hi = delta_hi;
    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (probe(mid) == Classification::bounded)
            lo = mid;
        else
            hi = mid;
    }
    result.delta_lo = lo;
    result.delta_hi = hi;
    return result;
}

}  // namespace ddelab
