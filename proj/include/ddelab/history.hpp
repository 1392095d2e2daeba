#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ddelab/model.hpp"

namespace ddelab {

using Vec2 = std::array<double, 2>;

/// Piecewise-defined vector function on [-tau, 0] that seeds the method
/// of steps. Pieces cover the span exactly; evaluation locates the piece
/// by binary search over the breakpoints. Piece i owns the half-open
/// interval [breaks[i], breaks[i+1]), the last piece also owns t = 0.
class HistoryFunction {
public:
    HistoryFunction(std::vector<double> breakpoints,
                    std::vector<std::function<Vec2(double)>> pieces);

    double t_begin() const { return breaks_.front(); }
    double t_end() const { return breaks_.back(); }
    double span() const { return t_end() - t_begin(); }
    const std::vector<double>& breakpoints() const { return breaks_; }

    Vec2 operator()(double t) const;

    /// Largest left/right mismatch over the interior breakpoints.
    double max_breakpoint_jump() const;

private:
    std::vector<double> breaks_;
    std::vector<std::function<Vec2(double)>> pieces_;
};

/// Tolerance for the endpoint conditions phi_tilde(-tau/2) = -delta and
/// phi_tilde(0) = 0 when constructing the blow-up history.
inline constexpr double kHistoryEndpointTol = 1e-9;

/// The constructed Cartesian history
///   phi(t) = -delta on [-tau, -tau/2], phi_tilde(t) on (-tau/2, 0],
///   psi(t) = -delta on [-tau, 0],
/// with breakpoints {-tau, -tau/2, 0}. Throws std::invalid_argument
/// naming the endpoint if phi_tilde violates phi_tilde(-tau/2) = -delta
/// or phi_tilde(0) = 0 beyond kHistoryEndpointTol.
HistoryFunction theorem1_history(const ModelParams& params,
                                 const std::function<double(double)>& phi_tilde);

/// Same history in polar form (r, theta), angle unwrapped within
/// [-3pi/4, -pi/2]; ends at the start state (delta, -pi/2).
HistoryFunction theorem1_polar_history(const ModelParams& params,
                                       const std::function<double(double)>& phi_tilde);

/// The ramp phi_tilde(t) = 2 delta t / tau used by all figure runs.
std::function<double(double)> linear_phi_tilde(const ModelParams& params);

/// Constant history on [-tau, 0].
HistoryFunction constant_history(double tau, Vec2 value);

} // namespace ddelab
