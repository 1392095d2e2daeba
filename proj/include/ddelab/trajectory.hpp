#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddelab/history.hpp"

namespace ddelab {

enum class RunStatus {
    reached_end,
    blowup_suspected,
    step_floor,
    nonfinite_derivative,
};

const char* to_string(RunStatus status);

struct StepStats {
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
    std::size_t n_rhs = 0;
};

/// Continuous solution built from one dense interpolant per accepted
/// step. Each segment stores the five coefficient rows of the quartic
/// continuous extension; evaluation at a knot uses the right segment.
/// Evaluation outside the span throws, never extrapolates. A DDE run
/// carries its history as an evaluable prefix covering [-tau, t_0].
class Trajectory {
public:
    /// Trivial one-point trajectory (t = 0, scalar 0); a placeholder that
    /// result structs can hold before a run is assigned in.
    Trajectory() = default;
    Trajectory(int dim, double t0, std::span<const double> y0);

    int dim() const { return dim_; }
    std::size_t segment_count() const { return knots_.size() - 1; }
    const std::vector<double>& knots() const { return knots_; }

    double t_front() const { return knots_.front(); }
    double t_back() const { return knots_.back(); }
    /// Span start including the history prefix, if any.
    double span_begin() const { return prefix_ ? prefix_->t_begin() : knots_.front(); }
    double span_end() const { return knots_.back(); }

    void eval(double t, std::span<double> out) const;
    std::vector<double> eval(double t) const;

    std::vector<double> front_state() const;
    std::vector<double> back_state() const;

    RunStatus status() const { return status_; }
    const StepStats& stats() const { return stats_; }

    /// Worst relative continuity defect across interior knots.
    double max_knot_defect() const;

    // Builder interface used by the integrators. t_right is the absolute
    // right-end time of the new segment so forced landings stay exact.
    void append_segment(double t_right, std::span<const double> rcont);
    void set_status(RunStatus status) { status_ = status; }
    void set_stats(const StepStats& stats) { stats_ = stats; }
    void set_prefix(HistoryFunction history);
    const std::optional<HistoryFunction>& prefix() const { return prefix_; }

private:
    void eval_segment(std::size_t seg, double t, std::span<double> out) const;

    int dim_ = 1;
    std::vector<double> knots_{0.0};
    std::vector<double> coef_;   // segment-major, 5 rows of dim_ each
    std::vector<double> y_final_{0.0};
    std::optional<HistoryFunction> prefix_;
    RunStatus status_ = RunStatus::reached_end;
    StepStats stats_;
};

enum class CrossingDirection { rising, falling, any };

/// Scalar observable whose sign changes mark an event along a run.
struct EventSpec {
    std::function<double(double, std::span<const double>)> observable;
    CrossingDirection direction = CrossingDirection::any;
    std::string name;
};

/// Earliest root of the observable after search_from with the requested
/// crossing direction: knot intervals are scanned for sign changes and
/// the dense output bisected to 1e-12 time accuracy. Absence of a
/// crossing is a value, not an error.
std::optional<double> find_event(const Trajectory& traj, const EventSpec& spec,
                                 double search_from);

} // namespace ddelab
