#include "ddelab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddelab {

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::reached_end: return "reached-end";
        case RunStatus::blowup_suspected: return "blow-up suspected";
        case RunStatus::step_floor: return "step floor reached";
        case RunStatus::nonfinite_derivative: return "non-finite derivative";
    }
    return "unknown";
}

Trajectory::Trajectory(int dim, double t0, std::span<const double> y0)
    : dim_(dim), knots_{t0}, y_final_(y0.begin(), y0.end()) {
    if (dim <= 0 || y0.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("Trajectory: dimension mismatch");
}

void Trajectory::append_segment(double t_right, std::span<const double> rcont) {
    if (!(t_right > knots_.back()))
        throw std::invalid_argument("Trajectory: segment width must be positive");
    if (rcont.size() != static_cast<std::size_t>(5 * dim_))
        throw std::invalid_argument("Trajectory: expected 5*dim dense coefficients");
    coef_.insert(coef_.end(), rcont.begin(), rcont.end());
    knots_.push_back(t_right);
    // Right-end state = rcont1 + rcont2 by construction of the extension.
    for (int i = 0; i < dim_; ++i) y_final_[i] = rcont[i] + rcont[dim_ + i];
}

void Trajectory::set_prefix(HistoryFunction history) {
    if (dim_ != 2)
        throw std::invalid_argument("Trajectory: history prefix is two-dimensional");
    prefix_ = std::move(history);
}

void Trajectory::eval_segment(std::size_t seg, double t, std::span<double> out) const {
    const double t0 = knots_[seg];
    const double h = knots_[seg + 1] - t0;
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    const double* c = coef_.data() + 5 * dim_ * seg;
    for (int i = 0; i < dim_; ++i) {
        out[i] = c[i] + s * (c[dim_ + i] +
                             s1 * (c[2 * dim_ + i] +
                                   s * (c[3 * dim_ + i] + s1 * c[4 * dim_ + i])));
    }
}

void Trajectory::eval(double t, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("Trajectory::eval: output size mismatch");
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (t < span_begin() - slack || t > span_end() + slack)
        throw std::out_of_range("Trajectory::eval: time outside span");
    t = std::clamp(t, span_begin(), span_end());
    if (prefix_ && t < knots_.front()) {
        const Vec2 v = (*prefix_)(t);
        out[0] = v[0];
        out[1] = v[1];
        return;
    }
    if (knots_.size() == 1) {
        // Degenerate zero-length run: only the initial state exists.
        std::copy(y_final_.begin(), y_final_.end(), out.begin());
        return;
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t seg = static_cast<std::size_t>(it - knots_.begin());
    seg = (seg == 0) ? 0 : seg - 1;
    if (seg >= segment_count()) seg = segment_count() - 1;
    eval_segment(seg, t, out);
}

std::vector<double> Trajectory::eval(double t) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    eval(t, out);
    return out;
}

std::vector<double> Trajectory::front_state() const { return eval(knots_.front()); }

std::vector<double> Trajectory::back_state() const {
    std::vector<double> out(y_final_);
    return out;
}

double Trajectory::max_knot_defect() const {
    double worst = 0.0;
    std::vector<double> left(dim_), right(dim_);
    for (std::size_t k = 1; k + 1 < knots_.size(); ++k) {
        eval_segment(k - 1, knots_[k], left);
        eval_segment(k, knots_[k], right);
        for (int i = 0; i < dim_; ++i) {
            const double scale = std::max({1.0, std::abs(left[i]), std::abs(right[i])});
            worst = std::max(worst, std::abs(left[i] - right[i]) / scale);
        }
    }
    return worst;
}

namespace {

double eval_observable(const Trajectory& traj, const EventSpec& spec, double t,
                       std::vector<double>& scratch) {
    traj.eval(t, scratch);
    return spec.observable(t, scratch);
}

bool direction_ok(CrossingDirection dir, double ga, double gb) {
    switch (dir) {
        case CrossingDirection::rising: return ga < 0.0 && gb >= 0.0;
        case CrossingDirection::falling: return ga > 0.0 && gb <= 0.0;
        case CrossingDirection::any: return (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
    }
    return false;
}

} // namespace

std::optional<double> find_event(const Trajectory& traj, const EventSpec& spec,
                                 double search_from) {
    constexpr double kTimeTol = 1e-12;
    const double t_end = traj.span_end();
    double a = std::max(search_from, traj.span_begin());
    if (a >= t_end) return std::nullopt;
    std::vector<double> scratch(static_cast<std::size_t>(traj.dim()));
    double ga = eval_observable(traj, spec, a, scratch);

    const auto& knots = traj.knots();
    std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(knots.begin(), knots.end(), a) - knots.begin());
    bool last = false;
    while (!last) {
        double b;
        if (idx < knots.size()) {
            b = knots[idx++];
        } else {
            b = t_end;
            last = true;
        }
        if (b >= t_end) last = true;
        if (b <= a) continue;
        const double gb = eval_observable(traj, spec, b, scratch);
        if (direction_ok(spec.direction, ga, gb)) {
            double lo = a, hi = b, glo = ga;
            while (hi - lo > kTimeTol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gmid = eval_observable(traj, spec, mid, scratch);
                if (direction_ok(spec.direction, glo, gmid)) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gmid;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        ga = gb;
    }
    return std::nullopt;
}

} // namespace ddelab
