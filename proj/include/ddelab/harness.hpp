#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddelab/blowup.hpp"
#include "ddelab/branches.hpp"
#include "ddelab/output.hpp"

namespace ddelab {

// Report serialization (stable field names; missing values become null).
std::string to_json_string(const BlowupReport& report);
std::string to_json_string(const BoundsReport& report);
std::string to_json_string(const ThresholdResult& result);
std::string to_table_string(const BlowupReport& report);
std::string to_table_string(const BoundsReport& report);

/// Runs fn(0..n-1) on a bounded worker pool. Results must be stored by
/// index by the callee; the first exception, if any, is rethrown after
/// all workers finish.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

/// Ordered key=value pairs; written as a sidecar the CLI can reload via
/// --config, making every output reproducible from its own metadata.
using MetaMap = std::vector<std::pair<std::string, std::string>>;

struct HarnessOptions {
    std::string out_dir = "out";
    IntegratorOptions integ;
    double t_horizon = 100.0;
    int workers = 1;
    /// Extra uniform-grid rows merged into trajectory CSVs (0 = knots only).
    int samples = 0;
    bool csv = true;
    bool svg = true;
    bool json = true;
};

struct SimulateSpec {
    double tau = 1.0;
    double delta = 1.0;
    /// Initial radius for the tau = 0 runs (no delay, no history).
    double r0 = 0.1;
    /// "cartesian" or "polar"; both use the ramp history when tau > 0.
    std::string form = "cartesian";
    std::string phi_preset = "linear";
};

struct SimulateResult {
    BlowupReport report;
    Trajectory traj;
    std::vector<std::string> files;
};

/// Integration core of run_simulate: validates the spec, picks the form
/// (tau = 0 always runs polar), integrates and classifies. No file output.
struct SimulatedRun {
    Trajectory traj;
    BlowupReport report;
    bool polar_form = false;
};

SimulatedRun simulate_trajectory(const SimulateSpec& spec, const IntegratorOptions& integ,
                                 double t_horizon);

SimulateResult run_simulate(const SimulateSpec& spec, const HarnessOptions& opts);

struct FigureRun {
    double delta = 0.0;
    BlowupReport report;
};

struct FigureResult {
    std::string name;
    std::vector<FigureRun> runs;   // empty for the diagram figure
    std::vector<std::string> files;
};

/// Fixed parameter sets: "tau1" (tau=1, four deltas), "tau02" (tau=0.2,
/// bounded/blow-up pair with orbit plots), "tau001" (tau=0.01, six
/// near-threshold deltas), "diagram" (branch diagram, |n| <= 5).
FigureResult run_figure(const std::string& name, const HarnessOptions& opts);

struct PeriodicSpec {
    double tau = 1.0;
    int n_max = 3;
    bool seed_run = false;
    /// Seeded runs integrate over [0, seed_span_factor * tau].
    double seed_span_factor = 5.0;
};

struct PeriodicRow {
    EquilibriumPoint point;
    EquilibriumResidual residual;
    std::optional<double> drift;
};

struct PeriodicResult {
    std::vector<PeriodicRow> rows;
    std::vector<std::string> files;
};

PeriodicResult run_periodic(const PeriodicSpec& spec, const HarnessOptions& opts);

/// Max |r(t) - r*| over [0, span] for a polar run seeded at the
/// equilibrium's exact rotating state.
double seeded_drift(const EquilibriumPoint& point, double span,
                    IntegratorOptions opts = {});

struct ThresholdSpec {
    double tau = 0.2;
    double lo = 2.0;
    double hi = 3.0;
    double tol = 0.01;
};

struct ThresholdRunResult {
    ThresholdResult result;
    std::vector<std::string> files;
};

ThresholdRunResult run_threshold(const ThresholdSpec& spec, const HarnessOptions& opts);

struct VerifyResult {
    BoundsReport report;
    std::vector<std::string> files;
};

VerifyResult run_verify(const ModelParams& params, const HarnessOptions& opts);

}  // namespace ddelab
