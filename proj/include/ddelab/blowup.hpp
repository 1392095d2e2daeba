#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddelab/integrator.hpp"
#include "ddelab/model.hpp"

namespace ddelab {

/// The constant in the radius lower bound r(t_{-pi/4}) >= alpha * delta:
/// alpha = ((2 - sqrt 2)/(2 + sqrt 2))^(1/(2 sqrt 2)), about 0.5362.
double alpha_constant();

/// Angular equilibria of the first-interval polar flow at frozen radius r.
/// They exist iff delta * r > 1/sqrt(2); theta_s is the stable one,
/// always in (pi/4, 3pi/4), and theta_u = 3pi/2 - theta_s the unstable one.
struct ThetaEquilibria {
    bool exists = false;
    double theta_s = 0.0;
    double theta_u = 0.0;
};

ThetaEquilibria theta_equilibria(double delta, double r);

enum class Classification { blow_up, bounded, horizon_reached };
const char* to_string(Classification kind);

struct BlowupReport {
    Classification classification = Classification::horizon_reached;
    RunStatus status = RunStatus::reached_end;
    /// Extrapolated singularity time; present only for blow-up.
    std::optional<double> T_est;
    double r_last = 0.0;
    double t_stop = 0.0;
    int extrapolation_points = 0;
};

struct BlowupEstimate {
    double T_est = 0.0;
    int n_points = 0;
    double rms_residual = 0.0;
};

/// Runs the standard setup: ramp history (plateau -delta, then the linear
/// climb to zero) integrated in Cartesian form up to t_horizon or the
/// radius guard, whichever comes first.
Trajectory run_ramp_setup(const ModelParams& params, double t_horizon = 100.0,
                          IntegratorOptions opts = {});

/// Least-squares linear fit of 1/r(t) over the trailing knots whose radius
/// lies in [r_max/100, r_max]; the fitted zero crossing is the blow-up
/// time estimate, clamped to at least the last integrated time. Throws
/// std::runtime_error("insufficient tail data") with fewer than 4 usable
/// knots and "tail radius not diverging" when the fitted slope is not
/// negative.
BlowupEstimate estimate_blowup_fit(const Trajectory& traj, double r_max = 1e8,
                                   const RadiusFn& radius = {});
double estimate_blowup_time(const Trajectory& traj, double r_max = 1e8,
                            const RadiusFn& radius = {});

/// Verdict protocol: blow-up if the radius guard tripped; bounded if the
/// horizon was reached and the radius stayed below r_max/10 throughout the
/// trailing window; horizon-reached otherwise (slow near-threshold runs
/// and integrator failures land here).  radius must match the norm the run
/// was integrated with (empty = Euclidean).
BlowupReport classify_run(const Trajectory& traj, double r_max = 1e8,
                          double tail_window = 20.0, const RadiusFn& radius = {});
BlowupReport classify_run(const ModelParams& params, double t_horizon = 100.0,
                          const IntegratorOptions& opts = {});

/// Polar samples of a planar trajectory at the given times, with the angle
/// unwrapped through the sample chain. A NaN hint starts from the
/// principal branch at the first sample.
std::vector<PolarState> polar_samples(const Trajectory& traj,
                                      std::span<const double> times,
                                      double theta_hint = std::numeric_limits<double>::quiet_NaN());

struct CheckResult {
    std::string name;
    bool applicable = false;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct BoundsReport {
    double delta = 0.0;
    double tau = 0.0;
    double tau_prime = 0.0;
    double alpha_delta = 0.0;
    Classification classification = Classification::horizon_reached;
    std::optional<double> t_quarter;    // first rise of theta through -pi/4
    std::optional<double> r_at_quarter;
    std::optional<double> t_zero;       // first rise of theta through 0
    std::optional<double> T_est;
    double t_stop = 0.0;
    double r_last = 0.0;
    std::vector<CheckResult> checks;
    /// True iff every check is applicable and passed.
    bool all_passed = false;
};

/// Runs the ramp-history setup and evaluates the quantitative estimates
/// behind the blow-up proof:
///   quarter-angle-time:      t_{-pi/4} <= tau'/2
///   radius-lower-bound:      r(t_{-pi/4}) >= alpha * delta
///   zero-angle-gap:          t_0 - t_{-pi/4} <= tau'/4
///   blowup-before-half-lag:  blow-up with T_est < tau'
///   angle-below-stable-branch: theta(t) < theta_s(r(t)) at sampled knots
///   pole-time-upper-bound:   T_est <= t_0 + 1/(delta r(t_0)) + 1e-3
/// Checks whose inputs never materialized (no crossing, no blow-up) are
/// reported as not applicable and count as failures in all_passed.
BoundsReport verify_theorem1_bounds(const ModelParams& params,
                                    double t_horizon = 100.0,
                                    const IntegratorOptions& opts = {});

struct ThresholdProbe {
    double delta = 0.0;
    Classification classification = Classification::horizon_reached;
};

struct ThresholdResult {
    double delta_lo = 0.0;   // largest delta that classified bounded
    double delta_hi = 0.0;   // smallest delta that classified non-bounded
    std::vector<ThresholdProbe> probes;
};

/// Bisection on delta between a bounded lower endpoint and a blowing-up
/// upper endpoint until the bracket is narrower than tol. Probes that
/// come back horizon-reached count as the non-bounded side, keeping the
/// bracket honest for slow near-threshold blow-ups. Throws
/// std::runtime_error("bracket invalid ...") when the endpoints do not
/// classify as required.
ThresholdResult threshold_search(double tau, double delta_lo, double delta_hi,
                                 double tol = 0.01, double t_horizon = 100.0,
                                 const IntegratorOptions& opts = {});

}  // namespace ddelab
