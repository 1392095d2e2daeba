#include "ddelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ddelab/integrator.hpp"
#include "ddelab/model.hpp"

namespace ddelab {

namespace {

using ordered_json = nlohmann::ordered_json;

// Compact value for file names and metadata keys (0.2, 13.75, 1e-09).
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double polar_radius(std::span<const double> y) { return std::abs(y[0]); }

std::string formats_string(const HarnessOptions& opts) {
    std::string s;
    for (const char* f : {opts.csv ? "csv" : nullptr, opts.svg ? "svg" : nullptr,
                          opts.json ? "json" : nullptr})
        if (f) {
            if (!s.empty()) s += ',';
            s += f;
        }
    return s.empty() ? std::string("none") : s;
}

MetaMap global_meta(const HarnessOptions& opts) {
    return {
        {"out-dir", opts.out_dir},
        {"rel-tol", format_double(opts.integ.rel_tol)},
        {"abs-tol", format_double(opts.integ.abs_tol)},
        {"r-max", format_double(opts.integ.r_max)},
        {"horizon", format_double(opts.t_horizon)},
        {"workers", std::to_string(opts.workers)},
        {"samples", std::to_string(opts.samples)},
        {"format", formats_string(opts)},
    };
}

// Values with separators must be quoted or the config reader splits them
// into a list (e.g. format=csv,svg,json).
std::string config_value(const std::string& v) {
    if (v.find_first_of(", =\t") == std::string::npos) return v;
    return "\"" + v + "\"";
}

// Sidecar in the same key=value format the CLI reads back with --config:
// global options first, then a [subcommand] section.
std::string meta_text(const MetaMap& global, const std::string& section,
                      const MetaMap& local) {
    std::string s = "# run metadata; rerun with: ddelab --config <this file> " + section + "\n";
    for (const auto& [k, v] : global) s += k + "=" + config_value(v) + "\n";
    s += "\n[" + section + "]\n";
    for (const auto& [k, v] : local) s += k + "=" + config_value(v) + "\n";
    return s;
}

std::vector<std::string> meta_lines(const MetaMap& global, const std::string& section,
                                    const MetaMap& local) {
    std::vector<std::string> lines;
    for (const auto& [k, v] : global) lines.push_back(k + "=" + v);
    lines.push_back("[" + section + "]");
    for (const auto& [k, v] : local) lines.push_back(k + "=" + v);
    return lines;
}

ordered_json config_json(const MetaMap& global, const std::string& section,
                         const MetaMap& local) {
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : global) cfg[k] = v;
    ordered_json sub = ordered_json::object();
    for (const auto& [k, v] : local) sub[k] = v;
    cfg[section] = std::move(sub);
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ordered_json opt_json(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json blowup_json(const BlowupReport& report) {
    ordered_json j = ordered_json::object();
    j["classification"] = to_string(report.classification);
    j["status"] = to_string(report.status);
    j["T_est"] = opt_json(report.T_est);
    j["r_last"] = report.r_last;
    j["t_stop"] = report.t_stop;
    j["extrapolation_points"] = report.extrapolation_points;
    return j;
}

ordered_json bounds_json(const BoundsReport& report) {
    ordered_json j = ordered_json::object();
    j["delta"] = report.delta;
    j["tau"] = report.tau;
    j["tau_prime"] = report.tau_prime;
    j["alpha_delta"] = report.alpha_delta;
    j["classification"] = to_string(report.classification);
    j["t_quarter"] = opt_json(report.t_quarter);
    j["r_at_quarter"] = opt_json(report.r_at_quarter);
    j["t_zero"] = opt_json(report.t_zero);
    j["T_est"] = opt_json(report.T_est);
    j["t_stop"] = report.t_stop;
    j["r_last"] = report.r_last;
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json cj = ordered_json::object();
        cj["name"] = c.name;
        cj["applicable"] = c.applicable;
        cj["passed"] = c.passed;
        cj["lhs"] = c.lhs;
        cj["rhs"] = c.rhs;
        checks.push_back(std::move(cj));
    }
    j["checks"] = std::move(checks);
    j["all_passed"] = report.all_passed;
    return j;
}

ordered_json threshold_json(const ThresholdResult& result) {
    ordered_json j = ordered_json::object();
    j["delta_lo"] = result.delta_lo;
    j["delta_hi"] = result.delta_hi;
    j["width"] = result.delta_hi - result.delta_lo;
    ordered_json probes = ordered_json::array();
    for (const auto& p : result.probes) {
        ordered_json pj = ordered_json::object();
        pj["delta"] = p.delta;
        pj["classification"] = to_string(p.classification);
        probes.push_back(std::move(pj));
    }
    j["probes"] = std::move(probes);
    return j;
}

void append_kv(std::string& out, const char* key, const std::string& value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-22s", key);
    out += buf;
    out += value;
    out += '\n';
}

std::string opt_str(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("-");
}

// Times for trajectory export: every knot plus an optional uniform grid.
std::vector<double> export_times(const Trajectory& traj, int samples) {
    std::vector<double> ts = traj.knots();
    if (samples > 1) {
        const double t0 = traj.t_front(), t1 = traj.t_back();
        for (int i = 0; i < samples; ++i)
            ts.push_back(t0 + (t1 - t0) * i / (samples - 1));
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    }
    return ts;
}

CsvTable trajectory_table(const Trajectory& traj, bool polar_form, int samples) {
    CsvTable table;
    const std::vector<double> times = export_times(traj, samples);
    std::vector<double> state(static_cast<std::size_t>(traj.dim()));
    if (polar_form) {
        table.columns = {"t", "r", "theta", "x", "y"};
        for (double t : times) {
            traj.eval(t, state);
            const CartesianState c = to_cartesian({state[0], state[1]});
            table.add_row(std::vector<double>{t, state[0], state[1], c.x, c.y});
        }
    } else {
        table.columns = {"t", "x", "y", "r", "theta"};
        const std::vector<PolarState> polar = polar_samples(traj, times);
        for (std::size_t i = 0; i < times.size(); ++i) {
            traj.eval(times[i], state);
            table.add_row(
                std::vector<double>{times[i], state[0], state[1], polar[i].r, polar[i].theta});
        }
    }
    return table;
}

PlotSeries radius_series(const Trajectory& traj, bool polar_form, const std::string& label) {
    PlotSeries s;
    s.label = label;
    std::vector<double> state(static_cast<std::size_t>(traj.dim()));
    for (double t : traj.knots()) {
        traj.eval(t, state);
        s.x.push_back(t);
        s.y.push_back(polar_form ? std::abs(state[0]) : std::hypot(state[0], state[1]));
    }
    return s;
}

// (x, y) orbit at the knots, cut at the first escape past the cap so a
// blow-up tail does not crush the interesting part of the portrait.
PlotSeries orbit_series(const Trajectory& traj, bool polar_form, double cap,
                        const std::string& label) {
    PlotSeries s;
    s.label = label;
    std::vector<double> state(static_cast<std::size_t>(traj.dim()));
    for (double t : traj.knots()) {
        traj.eval(t, state);
        CartesianState c{state[0], state[1]};
        if (polar_form) c = to_cartesian({state[0], state[1]});
        if (std::hypot(c.x, c.y) > cap) break;
        s.x.push_back(c.x);
        s.y.push_back(c.y);
    }
    return s;
}

void write_orbit_svg(const std::string& path, const Trajectory& traj, bool polar_form,
                     double cap, const std::string& title,
                     const std::vector<std::string>& metadata) {
    PlotOptions plot;
    plot.title = title;
    plot.x_label = "x";
    plot.y_label = "y";
    plot.equal_axes = true;
    plot.width = 560;
    plot.metadata = metadata;
    const PlotSeries series[] = {orbit_series(traj, polar_form, cap, "orbit")};
    write_svg_plot(path, series, plot);
}

struct RunArtifacts {
    std::string out_dir;
    std::vector<std::string>* files = nullptr;

    std::string add(const std::string& name) {
        const std::string path = join_path(out_dir, name);
        files->push_back(path);
        return path;
    }
};

}  // namespace

std::string to_json_string(const BlowupReport& report) { return blowup_json(report).dump(2) + "\n"; }
std::string to_json_string(const BoundsReport& report) { return bounds_json(report).dump(2) + "\n"; }
std::string to_json_string(const ThresholdResult& result) {
    return threshold_json(result).dump(2) + "\n";
}

std::string to_table_string(const BlowupReport& report) {
    std::string s;
    append_kv(s, "classification", to_string(report.classification));
    append_kv(s, "status", to_string(report.status));
    append_kv(s, "T_est", opt_str(report.T_est));
    append_kv(s, "r_last", format_double(report.r_last));
    append_kv(s, "t_stop", format_double(report.t_stop));
    append_kv(s, "extrapolation_points", std::to_string(report.extrapolation_points));
    return s;
}

std::string to_table_string(const BoundsReport& report) {
    std::string s;
    append_kv(s, "delta", format_double(report.delta));
    append_kv(s, "tau", format_double(report.tau));
    append_kv(s, "tau_prime", format_double(report.tau_prime));
    append_kv(s, "alpha_delta", format_double(report.alpha_delta));
    append_kv(s, "classification", to_string(report.classification));
    append_kv(s, "t_quarter", opt_str(report.t_quarter));
    append_kv(s, "r_at_quarter", opt_str(report.r_at_quarter));
    append_kv(s, "t_zero", opt_str(report.t_zero));
    append_kv(s, "T_est", opt_str(report.T_est));
    append_kv(s, "t_stop", format_double(report.t_stop));
    append_kv(s, "r_last", format_double(report.r_last));
    s += '\n';
    for (const auto& c : report.checks) {
        const char* verdict = !c.applicable ? "[ N/A]" : c.passed ? "[PASS]" : "[FAIL]";
        char line[160];
        std::snprintf(line, sizeof line, "%s %-26s lhs=%-24.17g rhs=%.17g\n", verdict,
                      c.name.c_str(), c.lhs, c.rhs);
        s += line;
    }
    s += report.all_passed ? "all bounds hold\n" : "NOT all bounds hold\n";
    return s;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    const int pool_size = std::max(1, std::min(workers, n));
    if (pool_size == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int w = 0; w < pool_size; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

SimulatedRun simulate_trajectory(const SimulateSpec& spec, const IntegratorOptions& integ_in,
                                 double t_horizon) {
    if (!(spec.tau >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
    if (spec.tau > 0.0 && !(spec.delta > 0.0))
        throw std::invalid_argument("delta must be positive");
    if (spec.tau == 0.0 && !(spec.r0 > 0.0))
        throw std::invalid_argument("r0 must be positive");
    if (spec.form != "cartesian" && spec.form != "polar")
        throw std::invalid_argument("unknown form: " + spec.form);
    if (spec.phi_preset != "linear")
        throw std::invalid_argument("unknown history preset: " + spec.phi_preset);

    const ModelParams params{spec.tau, spec.delta};
    SimulatedRun out;
    out.polar_form = spec.form == "polar" || spec.tau == 0.0;

    IntegratorOptions integ = integ_in;
    if (out.polar_form) integ.radius = polar_radius;

    if (spec.tau == 0.0) {
        // No delay: the radius decouples, integrate the polar ODE directly.
        const OdeRhs rhs = [params](double, std::span<const double> y, std::span<double> dydt) {
            const PolarState d = polar_rhs(params, {y[0], y[1]}, {y[0], y[1]});
            dydt[0] = d.r;
            dydt[1] = d.theta;
        };
        const double y0[2] = {spec.r0, 0.0};
        out.traj = integrate_ode(rhs, 0.0, y0, t_horizon, integ);
    } else if (!out.polar_form) {
        out.traj = run_ramp_setup(params, t_horizon, integ);
    } else {
        const HistoryFunction history =
            theorem1_polar_history(params, linear_phi_tilde(params));
        const DdeRhs rhs = [params](double, std::span<const double> y,
                                    std::span<const double> yd, std::span<double> dydt) {
            const PolarState d = polar_rhs(params, {y[0], y[1]}, {yd[0], yd[1]});
            dydt[0] = d.r;
            dydt[1] = d.theta;
        };
        out.traj = integrate_dde(rhs, params.tau, history, 0.0, t_horizon, integ);
    }

    out.report = classify_run(out.traj, integ.r_max, 20.0,
                              out.polar_form ? RadiusFn(polar_radius) : RadiusFn{});
    return out;
}

SimulateResult run_simulate(const SimulateSpec& spec, const HarnessOptions& opts) {
    SimulatedRun run = simulate_trajectory(spec, opts.integ, opts.t_horizon);
    const bool polar_form = run.polar_form;

    std::filesystem::create_directories(opts.out_dir);
    SimulateResult result;
    result.traj = std::move(run.traj);
    result.report = run.report;

    std::string base;
    MetaMap local;
    if (spec.tau == 0.0) {
        base = "simulate_tau0_r0_" + num(spec.r0);
        local = {{"tau", num(spec.tau)},
                 {"r0", format_double(spec.r0)},
                 {"form", "polar"},
                 {"phi-tilde", spec.phi_preset}};
    } else {
        base = "simulate_tau" + num(spec.tau) + "_delta" + num(spec.delta) +
               (polar_form ? "_polar" : "");
        local = {{"tau", num(spec.tau)},
                 {"delta", num(spec.delta)},
                 {"form", spec.form},
                 {"phi-tilde", spec.phi_preset}};
    }

    const MetaMap global = global_meta(opts);
    RunArtifacts art{opts.out_dir, &result.files};
    if (opts.csv)
        write_csv(art.add(base + ".csv"),
                  trajectory_table(result.traj, polar_form, opts.samples));
    if (opts.svg) {
        const std::string run_desc =
            spec.tau == 0.0 ? "tau = 0, r0 = " + num(spec.r0)
                            : "tau = " + num(spec.tau) + ", delta = " + num(spec.delta);
        PlotOptions plot;
        plot.title = "radius, " + run_desc;
        plot.x_label = "t";
        plot.y_label = "r";
        plot.log_y = true;
        plot.y_cap = opts.integ.r_max;
        if (result.report.T_est) {
            plot.marker_x = *result.report.T_est;
            plot.marker_label = "T_est";
        }
        plot.metadata = meta_lines(global, "simulate", local);
        const PlotSeries series[] = {radius_series(result.traj, polar_form, "r(t)")};
        write_svg_plot(art.add(base + ".svg"), series, plot);

        const double start_scale = spec.tau == 0.0 ? spec.r0 : spec.delta;
        write_orbit_svg(art.add(base + "_orbit.svg"), result.traj, polar_form,
                        std::max(10.0, 2.0 * start_scale), "orbit, " + run_desc,
                        plot.metadata);
    }
    if (opts.json) {
        ordered_json j = ordered_json::object();
        j["tau"] = spec.tau;
        if (spec.tau == 0.0)
            j["r0"] = spec.r0;
        else
            j["delta"] = spec.delta;
        j["form"] = polar_form ? "polar" : "cartesian";
        j["report"] = blowup_json(result.report);
        j["config"] = config_json(global, "simulate", local);
        write_text_file(art.add(base + ".json"), j.dump(2) + "\n");
    }
    write_text_file(art.add(base + ".meta"), meta_text(global, "simulate", local));
    return result;
}

namespace {

struct FigurePreset {
    double tau = 0.0;
    std::vector<double> deltas;
};

FigurePreset figure_preset(const std::string& name) {
    if (name == "tau1") return {1.0, {0.01, 0.1, 1.0, 5.0}};
    if (name == "tau02") return {0.2, {2.0, 3.0}};
    if (name == "tau001") return {0.01, {13.7, 13.73, 13.74, 13.75, 13.8, 13.9}};
    throw std::invalid_argument("unknown figure name: " + name);
}

FigureResult run_branch_diagram(const HarnessOptions& opts) {
    FigureResult result;
    result.name = "diagram";
    const double tau_min = 0.01, tau_max = 8.0;
    const int n_span = 5, n_samples = 400;
    const std::vector<BranchSample> branches =
        bifurcation_diagram(tau_min, tau_max, -n_span, n_span, n_samples);

    const MetaMap global = global_meta(opts);
    const MetaMap local = {{"name", "diagram"}};
    RunArtifacts art{opts.out_dir, &result.files};

    if (opts.csv) {
        CsvTable table;
        table.columns = {"n", "tau", "omega", "r", "r4tau"};
        for (const auto& branch : branches)
            for (const auto& p : branch.points) {
                std::vector<std::string> row;
                row.push_back(std::to_string(branch.n));
                row.push_back(format_double(p.tau));
                row.push_back(format_double(p.omega));
                row.push_back(format_double(p.r));
                row.push_back(format_double(p.r * p.r * p.r * p.r * p.tau));
                table.add_row(std::move(row));
            }
        write_csv(art.add("figure_diagram.csv"), table);
    }
    if (opts.svg) {
        // Display cut |omega| <= 40 keeps the steep small-tau tails from
        // flattening everything else; the CSV holds the full set.
        const double omega_cut = 40.0;
        std::vector<PlotSeries> series;
        int zero_pieces = 0;
        for (const auto& branch : branches) {
            PlotSeries s;
            if (branch.n == 0)
                s.label = (zero_pieces++ == 0) ? "n=0-" : "n=0+";
            else
                s.label = "n=" + std::to_string(branch.n);
            for (const auto& p : branch.points) {
                if (std::abs(p.omega) > omega_cut) continue;
                s.x.push_back(p.tau);
                s.y.push_back(p.omega);
            }
            if (!s.x.empty()) series.push_back(std::move(s));
        }
        PlotOptions plot;
        plot.title = "equilibrium frequencies vs delay";
        plot.x_label = "tau";
        plot.y_label = "omega";
        plot.metadata = meta_lines(global, "figure", local);
        write_svg_plot(art.add("figure_diagram.svg"), series, plot);
    }
    if (opts.json) {
        ordered_json j = ordered_json::object();
        j["figure"] = "diagram";
        j["tau_min"] = tau_min;
        j["tau_max"] = tau_max;
        ordered_json arr = ordered_json::array();
        const BranchFold fold = k0_maximum();
        for (const auto& branch : branches) {
            ordered_json bj = ordered_json::object();
            bj["n"] = branch.n;
            bj["points"] = branch.points.size();
            arr.push_back(std::move(bj));
        }
        j["branches"] = std::move(arr);
        j["fold"] = {{"omega_star", fold.omega_star}, {"tau_star", fold.tau_star}};
        j["config"] = config_json(global, "figure", local);
        write_text_file(art.add("figure_diagram.json"), j.dump(2) + "\n");
    }
    write_text_file(art.add("figure_diagram.meta"), meta_text(global, "figure", local));
    return result;
}

}  // namespace

FigureResult run_figure(const std::string& name, const HarnessOptions& opts) {
    std::filesystem::create_directories(opts.out_dir);
    if (name == "diagram") return run_branch_diagram(opts);

    const FigurePreset preset = figure_preset(name);
    const int n_runs = static_cast<int>(preset.deltas.size());

    FigureResult result;
    result.name = name;
    result.runs.resize(static_cast<std::size_t>(n_runs));
    std::vector<Trajectory> trajs(static_cast<std::size_t>(n_runs));

    parallel_for(n_runs, opts.workers, [&](int i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const ModelParams params{preset.tau, preset.deltas[k]};
        trajs[k] = run_ramp_setup(params, opts.t_horizon, opts.integ);
        result.runs[k].delta = preset.deltas[k];
        result.runs[k].report = classify_run(trajs[k], opts.integ.r_max);
    });

    const MetaMap global = global_meta(opts);
    const MetaMap local = {{"name", name}};
    RunArtifacts art{opts.out_dir, &result.files};
    const std::string base = "figure_" + name;

    if (opts.csv)
        for (int i = 0; i < n_runs; ++i)
            write_csv(art.add(base + "_delta" + num(preset.deltas[i]) + ".csv"),
                      trajectory_table(trajs[i], false, opts.samples));
    if (opts.svg) {
        std::vector<PlotSeries> series;
        for (int i = 0; i < n_runs; ++i)
            series.push_back(radius_series(trajs[static_cast<std::size_t>(i)], false,
                                           "delta=" + num(preset.deltas[i])));
        PlotOptions plot;
        plot.title = "radius growth, tau = " + num(preset.tau);
        plot.x_label = "t";
        plot.y_label = "r";
        plot.log_y = true;
        plot.y_cap = opts.integ.r_max;
        plot.metadata = meta_lines(global, "figure", local);
        write_svg_plot(art.add(base + ".svg"), series, plot);

        if (name == "tau02")
            // Companion phase portraits; blow-up orbits cut once they escape.
            for (int i = 0; i < n_runs; ++i)
                write_orbit_svg(
                    art.add(base + "_delta" + num(preset.deltas[i]) + "_orbit.svg"),
                    trajs[static_cast<std::size_t>(i)], false,
                    std::max(10.0, 2.0 * preset.deltas[i]),
                    "orbit, tau = " + num(preset.tau) + ", delta = " + num(preset.deltas[i]),
                    meta_lines(global, "figure", local));
    }
    if (opts.json) {
        ordered_json j = ordered_json::object();
        j["figure"] = name;
        j["tau"] = preset.tau;
        ordered_json runs = ordered_json::array();
        for (const auto& run : result.runs) {
            ordered_json rj = ordered_json::object();
            rj["delta"] = run.delta;
            rj["report"] = blowup_json(run.report);
            runs.push_back(std::move(rj));
        }
        j["runs"] = std::move(runs);
        j["config"] = config_json(global, "figure", local);
        write_text_file(art.add(base + ".json"), j.dump(2) + "\n");
    }
    write_text_file(art.add(base + ".meta"), meta_text(global, "figure", local));
    return result;
}

double seeded_drift(const EquilibriumPoint& point, double span, IntegratorOptions opts) {
    if (!(span > 0.0)) throw std::invalid_argument("span must be positive");
    const HistoryFunction history = periodic_seed_history(point);
    const ModelParams params{point.tau, 1.0};
    const DdeRhs rhs = [params](double, std::span<const double> y,
                                std::span<const double> yd, std::span<double> dydt) {
        const PolarState d = polar_rhs(params, {y[0], y[1]}, {yd[0], yd[1]});
        dydt[0] = d.r;
        dydt[1] = d.theta;
    };
    opts.radius = polar_radius;
    const Trajectory traj = integrate_dde(rhs, point.tau, history, 0.0, span, opts);
    if (traj.status() != RunStatus::reached_end)
        throw std::runtime_error(std::string("seeded run stopped early: ") +
                                 to_string(traj.status()));
    double worst = 0.0;
    std::vector<double> state(2);
    auto visit = [&](double t) {
        traj.eval(t, state);
        worst = std::max(worst, std::abs(state[0] - point.r));
    };
    for (double t : traj.knots()) visit(t);
    const int grid = 1000;
    for (int i = 0; i <= grid; ++i) visit(span * i / grid);
    return worst;
}

PeriodicResult run_periodic(const PeriodicSpec& spec, const HarnessOptions& opts) {
    if (!(spec.tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (spec.n_max < 0) throw std::invalid_argument("n-max must be nonnegative");
    std::filesystem::create_directories(opts.out_dir);

    const std::vector<EquilibriumPoint> points = enumerate_equilibria(spec.tau, spec.n_max);
    PeriodicResult result;
    result.rows.resize(points.size());

    parallel_for(static_cast<int>(points.size()), spec.seed_run ? opts.workers : 1,
                 [&](int i) {
                     const std::size_t k = static_cast<std::size_t>(i);
                     PeriodicRow& row = result.rows[k];
                     row.point = points[k];
                     row.residual = equilibrium_residual(points[k]);
                     if (spec.seed_run) {
                         // strongly unstable points can escape to the radius
                         // guard inside the window; report those without a
                         // drift figure instead of failing the whole sweep
                         try {
                             row.drift = seeded_drift(points[k],
                                                      spec.seed_span_factor * spec.tau,
                                                      opts.integ);
                         } catch (const std::runtime_error&) {
                             row.drift.reset();
                         }
                     }
                 });

    const MetaMap global = global_meta(opts);
    const MetaMap local = {
        {"tau", num(spec.tau)},
        {"n-max", std::to_string(spec.n_max)},
        {"seed-run", spec.seed_run ? "true" : "false"},
    };
    RunArtifacts art{opts.out_dir, &result.files};
    const std::string base =
        "periodic_tau" + num(spec.tau) + (spec.seed_run ? "_seeded" : "");

    if (opts.csv) {
        CsvTable table;
        table.columns = {"n", "tau", "omega", "r", "r4tau", "res1", "res2"};
        if (spec.seed_run) table.columns.push_back("drift");
        for (const auto& row : result.rows) {
            std::vector<std::string> cells;
            cells.push_back(std::to_string(row.point.n));
            cells.push_back(format_double(row.point.tau));
            cells.push_back(format_double(row.point.omega));
            cells.push_back(format_double(row.point.r));
            cells.push_back(format_double(row.point.r4tau()));
            cells.push_back(format_double(row.residual.res1));
            cells.push_back(format_double(row.residual.res2));
            if (spec.seed_run) cells.push_back(opt_str(row.drift));
            table.add_row(std::move(cells));
        }
        write_csv(art.add(base + ".csv"), table);
    }
    if (opts.json) {
        ordered_json j = ordered_json::object();
        j["tau"] = spec.tau;
        j["n_max"] = spec.n_max;
        ordered_json rows = ordered_json::array();
        for (const auto& row : result.rows) {
            ordered_json rj = ordered_json::object();
            rj["n"] = row.point.n;
            rj["omega"] = row.point.omega;
            rj["r"] = row.point.r;
            rj["r4tau"] = row.point.r4tau();
            rj["res1"] = row.residual.res1;
            rj["res2"] = row.residual.res2;
            rj["drift"] = opt_json(row.drift);
            rows.push_back(std::move(rj));
        }
        j["equilibria"] = std::move(rows);
        j["config"] = config_json(global, "periodic", local);
        write_text_file(art.add(base + ".json"), j.dump(2) + "\n");
    }
    write_text_file(art.add(base + ".meta"), meta_text(global, "periodic", local));
    return result;
}

ThresholdRunResult run_threshold(const ThresholdSpec& spec, const HarnessOptions& opts) {
    std::filesystem::create_directories(opts.out_dir);
    ThresholdRunResult result;
    result.result =
        threshold_search(spec.tau, spec.lo, spec.hi, spec.tol, opts.t_horizon, opts.integ);

    const MetaMap global = global_meta(opts);
    const MetaMap local = {
        {"tau", num(spec.tau)},
        {"lo", format_double(spec.lo)},
        {"hi", format_double(spec.hi)},
        {"tol", format_double(spec.tol)},
    };
    RunArtifacts art{opts.out_dir, &result.files};
    const std::string base = "threshold_tau" + num(spec.tau);

    if (opts.csv) {
        CsvTable table;
        table.columns = {"delta", "classification"};
        for (const auto& p : result.result.probes)
            table.add_row(
                std::vector<std::string>{format_double(p.delta), to_string(p.classification)});
        write_csv(art.add(base + ".csv"), table);
    }
    if (opts.json) {
        ordered_json j = threshold_json(result.result);
        j["tau"] = spec.tau;
        j["config"] = config_json(global, "threshold", local);
        write_text_file(art.add(base + ".json"), j.dump(2) + "\n");
    }
    write_text_file(art.add(base + ".meta"), meta_text(global, "threshold", local));
    return result;
}

VerifyResult run_verify(const ModelParams& params, const HarnessOptions& opts) {
    std::filesystem::create_directories(opts.out_dir);
    VerifyResult result;
    result.report = verify_theorem1_bounds(params, opts.t_horizon, opts.integ);

    const MetaMap global = global_meta(opts);
    const MetaMap local = {{"tau", num(params.tau)}, {"delta", num(params.delta)}};
    RunArtifacts art{opts.out_dir, &result.files};
    const std::string base =
        "verify_tau" + num(params.tau) + "_delta" + num(params.delta);

    if (opts.json) {
        ordered_json j = bounds_json(result.report);
        j["config"] = config_json(global, "verify-theorem1", local);
        write_text_file(art.add(base + ".json"), j.dump(2) + "\n");
    }
    write_text_file(art.add(base + ".meta"), meta_text(global, "verify-theorem1", local));
    return result;
}

}  // namespace ddelab
