#include "ddelab/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddelab {

CartesianState cartesian_rhs(const ModelParams&,
                             const CartesianState& current,
                             const CartesianState& delayed) {
    const double sq = current.x * current.x + current.y * current.y;
    return {current.x - current.y - delayed.x * sq,
            current.x + current.y - delayed.y * sq};
}

PolarState polar_rhs(const ModelParams&,
                     const PolarState& current,
                     const PolarState& delayed) {
    const double rr = current.r * delayed.r;
    const double dth = current.theta - delayed.theta;
    return {current.r * (1.0 - rr * std::cos(dth)),
            1.0 + rr * std::sin(dth)};
}

CartesianState stage1_ode_rhs(const ModelParams& params, const CartesianState& current) {
    return cartesian_rhs(params, current, {-params.delta, -params.delta});
}

PolarState stage1_polar_rhs(const ModelParams& params, const PolarState& current) {
    constexpr double pi = std::numbers::pi;
    const double sd = std::numbers::sqrt2 * params.delta;
    return {current.r + sd * current.r * current.r * std::sin(current.theta + pi / 4.0),
            1.0 + sd * current.r * std::sin(current.theta + 3.0 * pi / 4.0)};
}

PolarState to_polar(const CartesianState& state, double theta_hint) {
    if (state.x == 0.0 && state.y == 0.0)
        throw std::domain_error("to_polar: polar angle undefined at origin");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double base = std::atan2(state.y, state.x);
    const double k = std::round((theta_hint - base) / two_pi);
    return {std::hypot(state.x, state.y), base + k * two_pi};
}

CartesianState to_cartesian(const PolarState& state) {
    return {state.r * std::cos(state.theta), state.r * std::sin(state.theta)};
}

double nondelay_exact_radius(double r0, double t) {
    // r^2(t) = 1 / (1 + (1/r0^2 - 1) e^{-2t}); equivalent to the
    // textbook form but free of e^{2t} overflow.
    const double q = (1.0 / (r0 * r0) - 1.0) * std::exp(-2.0 * t);
    return 1.0 / std::sqrt(1.0 + q);
}

} // namespace ddelab
