#include "ddelab/history.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ddelab {

HistoryFunction::HistoryFunction(std::vector<double> breakpoints,
                                 std::vector<std::function<Vec2(double)>> pieces)
    : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (breaks_.size() < 2 || pieces_.size() != breaks_.size() - 1)
        throw std::invalid_argument("HistoryFunction: need n+1 breakpoints for n pieces");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()))
        throw std::invalid_argument("HistoryFunction: breakpoints must be sorted");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
        if (!(breaks_[i] < breaks_[i + 1]))
            throw std::invalid_argument("HistoryFunction: breakpoints must be strictly increasing");
}

Vec2 HistoryFunction::operator()(double t) const {
    const double slack = 1e-9 * std::max(1.0, std::abs(t_begin()));
    if (t < t_begin() - slack || t > t_end() + slack)
        throw std::out_of_range("HistoryFunction: evaluation outside span");
    t = std::clamp(t, t_begin(), t_end());
    // First breakpoint strictly greater than t; piece index is one less.
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
    idx = (idx == 0) ? 0 : idx - 1;
    if (idx >= pieces_.size()) idx = pieces_.size() - 1;
    return pieces_[idx](t);
}

double HistoryFunction::max_breakpoint_jump() const {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < breaks_.size(); ++i) {
        const Vec2 left = pieces_[i - 1](breaks_[i]);
        const Vec2 right = pieces_[i](breaks_[i]);
        worst = std::max({worst, std::abs(left[0] - right[0]), std::abs(left[1] - right[1])});
    }
    return worst;
}

namespace {

void check_endpoints(const ModelParams& params,
                     const std::function<double(double)>& phi_tilde) {
    const double tp = params.tau_prime();
    const double at_left = phi_tilde(-tp);
    const double at_zero = phi_tilde(0.0);
    const double scale = std::max(1.0, params.delta);
    if (std::abs(at_left + params.delta) > kHistoryEndpointTol * scale) {
        std::ostringstream msg;
        msg << "theorem1_history: phi_tilde(-tau/2) = " << at_left
            << ", expected -delta = " << -params.delta;
        throw std::invalid_argument(msg.str());
    }
    if (std::abs(at_zero) > kHistoryEndpointTol * scale) {
        std::ostringstream msg;
        msg << "theorem1_history: phi_tilde(0) = " << at_zero << ", expected 0";
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

HistoryFunction theorem1_history(const ModelParams& params,
                                 const std::function<double(double)>& phi_tilde) {
    if (!(params.tau > 0.0))
        throw std::invalid_argument("theorem1_history: tau must be positive");
    check_endpoints(params, phi_tilde);
    const double delta = params.delta;
    return HistoryFunction(
        {-params.tau, -params.tau_prime(), 0.0},
        {[delta](double) { return Vec2{-delta, -delta}; },
         [delta, phi_tilde](double t) { return Vec2{phi_tilde(t), -delta}; }});
}

HistoryFunction theorem1_polar_history(const ModelParams& params,
                                       const std::function<double(double)>& phi_tilde) {
    if (!(params.tau > 0.0))
        throw std::invalid_argument("theorem1_polar_history: tau must be positive");
    check_endpoints(params, phi_tilde);
    const double delta = params.delta;
    constexpr double pi = std::numbers::pi;
    // (x, y) = (-delta, -delta) sits at angle -3pi/4; along the ramp piece
    // y = -delta < 0 keeps atan2 inside (-pi, 0), so no unwrapping is
    // needed and theta runs continuously from -3pi/4 up to -pi/2.
    return HistoryFunction(
        {-params.tau, -params.tau_prime(), 0.0},
        {[delta](double) {
             return Vec2{std::numbers::sqrt2 * delta, -3.0 * pi / 4.0};
         },
         [delta, phi_tilde](double t) {
             const double p = phi_tilde(t);
             return Vec2{std::hypot(p, delta), std::atan2(-delta, p)};
         }});
}

std::function<double(double)> linear_phi_tilde(const ModelParams& params) {
    const double slope = 2.0 * params.delta / params.tau;
    return [slope](double t) { return slope * t; };
}

HistoryFunction constant_history(double tau, Vec2 value) {
    if (!(tau > 0.0))
        throw std::invalid_argument("constant_history: tau must be positive");
    return HistoryFunction({-tau, 0.0}, {[value](double) { return value; }});
}

} // namespace ddelab
