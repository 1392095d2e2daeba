#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ddelab/history.hpp"
#include "ddelab/trajectory.hpp"

namespace ddelab {

// Right-hand side of a plain ODE system: f(t, y, dydt).
using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

// Right-hand side of a DDE with a single constant lag: f(t, y, y_delayed, dydt).
using DdeRhs = std::function<void(double, std::span<const double>, std::span<const double>,
                                  std::span<double>)>;

// Norm measuring "how big" a state is, for the blow-up guard and the
// classification protocol. Empty means the Euclidean norm; polar-form
// runs use |y[0]| so the unbounded angle does not count.
using RadiusFn = std::function<double(std::span<const double>)>;

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Initial step size; 0 selects it automatically from the local derivative scale.
    double h_init = 0.0;
    double h_min = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    // Integration stops with blowup_suspected once radius(y) exceeds this guard.
    double r_max = 1e8;
    // Times the stepper must hit exactly (discontinuity points of the rhs or
    // its derivatives).  Need not be sorted; entries outside the span are ignored.
    std::vector<double> breakpoints;
    // Norm used against the r_max guard.  Defaults to the Euclidean norm of y.
    RadiusFn radius;
};

// Integrates y' = f(t, y) from (t0, y0) to t_end with the embedded 5(4) pair,
// producing a trajectory with a piecewise-quartic dense interpolant.
Trajectory integrate_ode(const OdeRhs& rhs, double t0, std::span<const double> y0,
                         double t_end, const IntegratorOptions& opts = {});

// Integrates y'(t) = f(t, y(t), y(t - lag)) by the method of steps.  The
// history supplies y on [t0 - lag, t0]; its breakpoints, shifted by every
// multiple of the lag, become mandatory step boundaries so the interpolant
// never bridges a derivative discontinuity.  The returned trajectory also
// evaluates on the history interval.
Trajectory integrate_dde(const DdeRhs& rhs, double lag, const HistoryFunction& history,
                         double t0, double t_end, const IntegratorOptions& opts = {});

// Fixed-step variant of the 5(4) pair (no error control, no guard), used for
// step-size refinement studies.  n_steps uniform steps from t0 to t_end.
Trajectory integrate_ode_fixed(const OdeRhs& rhs, double t0, std::span<const double> y0,
                               double t_end, int n_steps);

struct ConvergenceRow {
    int n_steps = 0;
    double h = 0.0;
    double err_final = 0.0;   // max-norm error at t_end
    double err_dense = 0.0;   // max-norm error sampled off the step grid
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    // log2(err[k-1]/err[k]) between successive halvings, for the final-time error.
    std::vector<double> orders_final;
    std::vector<double> orders_dense;
};

// Runs the fixed-step integrator on a named problem with an exact solution at
// a ladder of step counts and reports the observed convergence order.
// Problems: "linear" (y' = A y, 2x2 rotation + growth) and "nondelay-polar"
// (the radial logistic equation r' = r - r^3 in one dimension).
ConvergenceReport convergence_study(const std::string& problem,
                                    std::span<const int> step_counts);

}  // namespace ddelab
