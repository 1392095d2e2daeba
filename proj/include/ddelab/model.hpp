#pragma once

#include <array>
#include <functional>

namespace ddelab {

/// Model parameters of the delayed oscillator family.
///
/// tau is the delay, delta the amplitude of the constructed initial
/// history. The half-delay tau/2 shows up throughout the blow-up
/// estimates and is always derived, never stored.
struct ModelParams {
    double tau = 1.0;
    double delta = 1.0;

    double tau_prime() const { return 0.5 * tau; }
};

struct CartesianState {
    double x = 0.0;
    double y = 0.0;
};

/// Polar state with an *unwrapped* angle: theta is a continuous real,
/// never reduced mod 2*pi. Event detection and the blow-up estimates
/// reason about theta crossing fixed levels, which wrapping would break.
struct PolarState {
    double r = 0.0;
    double theta = 0.0;
};

/// Right-hand side of the Cartesian system
///   x' = x - y - x_d (x^2 + y^2)
///   y' = x + y - y_d (x^2 + y^2)
/// where (x_d, y_d) is the state one delay in the past.
CartesianState cartesian_rhs(const ModelParams& params,
                             const CartesianState& current,
                             const CartesianState& delayed);

/// Polar form of the same system:
///   r'     = r (1 - r r_d cos(theta - theta_d))
///   theta' = 1 + r r_d sin(theta - theta_d)
PolarState polar_rhs(const ModelParams& params,
                     const PolarState& current,
                     const PolarState& delayed);

/// First-interval ODE obtained by substituting the constant history
/// value (-delta, -delta) for the delayed state. Evaluates through
/// cartesian_rhs so the two agree bit for bit.
CartesianState stage1_ode_rhs(const ModelParams& params, const CartesianState& current);

/// Polar form of the first-interval ODE:
///   r'     = r + sqrt(2) delta r^2 sin(theta + pi/4)
///   theta' = 1 + sqrt(2) delta r  sin(theta + 3pi/4)
PolarState stage1_polar_rhs(const ModelParams& params, const PolarState& current);

/// Converts to polar coordinates, choosing the angle branch closest to
/// theta_hint (the unwrap rule). Throws std::domain_error at the origin,
/// where the angle is undefined.
PolarState to_polar(const CartesianState& state, double theta_hint);

CartesianState to_cartesian(const PolarState& state);

/// Closed-form radius of the non-delay system r' = r (1 - r^2):
///   r(t) = r0 e^t / sqrt(1 + r0^2 (e^{2t} - 1)),
/// evaluated in a form that stays stable for large t. The angle grows
/// as theta0 + t. Serves as the exact oracle for the integrator tests.
double nondelay_exact_radius(double r0, double t);

} // namespace ddelab
