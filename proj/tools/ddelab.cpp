// Command-line front end: figure reproduction, blow-up bound verification,
// equilibrium branch tables, and threshold searches, with every output
// carrying the resolved configuration it was produced from.

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "ddelab/harness.hpp"
#include "ddelab/model.hpp"

namespace {

void parse_formats(const std::string& formats, ddelab::HarnessOptions& opts) {
    opts.csv = opts.svg = opts.json = false;
    std::stringstream stream(formats);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token == "csv")
            opts.csv = true;
        else if (token == "svg")
            opts.svg = true;
        else if (token == "json")
            opts.json = true;
        else if (!token.empty() && token != "none")
            throw std::invalid_argument("unknown output format: " + token);
    }
}

void print_files(const std::vector<std::string>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a planar oscillator whose cubic damping "
                 "acts with a delay: blow-up runs, figures, equilibrium branches, "
                 "threshold searches"};
    app.require_subcommand(1);
    app.set_config("--config", "", "load options from a run metadata sidecar");
    app.allow_config_extras(CLI::config_extras_mode::error);

    ddelab::HarnessOptions opts;
    std::string formats = "csv,svg,json";
    app.add_option("--out-dir", opts.out_dir, "output directory")->capture_default_str();
    app.add_option("--rel-tol", opts.integ.rel_tol, "relative tolerance")
        ->capture_default_str();
    app.add_option("--abs-tol", opts.integ.abs_tol, "absolute tolerance")
        ->capture_default_str();
    app.add_option("--r-max", opts.integ.r_max, "blow-up guard radius")
        ->capture_default_str();
    app.add_option("--horizon", opts.t_horizon, "integration horizon")
        ->capture_default_str();
    app.add_option("--workers", opts.workers, "worker pool size for sweeps")
        ->capture_default_str();
    app.add_option("--samples", opts.samples,
                   "extra uniform CSV sample rows (0 = knots only)")
        ->capture_default_str();
    app.add_option("--format", formats, "comma list of outputs: csv,svg,json (or none)")
        ->capture_default_str();

    ddelab::SimulateSpec sim;
    auto* simulate =
        app.add_subcommand("simulate", "integrate one run and classify it")->configurable()->fallthrough();
    simulate->add_option("--tau", sim.tau, "delay (0 = no delay, start from r0)")
        ->capture_default_str();
    simulate->add_option("--delta", sim.delta, "history amplitude")->capture_default_str();
    simulate->add_option("--r0", sim.r0, "initial radius for tau = 0")
        ->capture_default_str();
    simulate->add_option("--form", sim.form, "integration form: cartesian or polar")
        ->capture_default_str();
    simulate->add_option("--phi-tilde", sim.phi_preset, "history climb preset")
        ->capture_default_str();

    std::string figure_name;
    auto* figure =
        app.add_subcommand("figure", "reproduce a fixed parameter set")->configurable()->fallthrough();
    figure->add_option("--name,name", figure_name, "tau1, tau02, tau001 or diagram")
        ->required();

    ddelab::ModelParams verify_params{1.0, 100.0};
    auto* verify = app.add_subcommand("verify-theorem1",
                                      "check the quantitative blow-up bounds for one run")
                       ->configurable()->fallthrough();
    verify->add_option("--tau", verify_params.tau, "delay")->capture_default_str();
    verify->add_option("--delta", verify_params.delta, "history amplitude")
        ->capture_default_str();

    ddelab::PeriodicSpec per;
    auto* periodic =
        app.add_subcommand("periodic", "enumerate equilibrium branches at one delay")
            ->configurable()->fallthrough();
    periodic->add_option("--tau", per.tau, "delay")->capture_default_str();
    periodic->add_option("--n-max", per.n_max, "largest branch index |n|")
        ->capture_default_str();
    periodic->add_flag("--seed-run", per.seed_run,
                       "integrate from each equilibrium and report radius drift");
    periodic->add_option("--seed-span", per.seed_span_factor,
                         "seeded run length in units of tau")
        ->capture_default_str();

    ddelab::ThresholdSpec thr;
    auto* threshold =
        app.add_subcommand("threshold", "bisect the blow-up threshold in delta")
            ->configurable()->fallthrough();
    threshold->add_option("--tau", thr.tau, "delay")->capture_default_str();
    threshold->add_option("--lo", thr.lo, "bounded lower endpoint")->capture_default_str();
    threshold->add_option("--hi", thr.hi, "blow-up upper endpoint")->capture_default_str();
    threshold->add_option("--tol", thr.tol, "final bracket width")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        parse_formats(formats, opts);

        // an explicit subcommand always precedes any section the config file
        // triggered, so the front of the parsed list is the one to run
        const auto& parsed = app.get_subcommands();
        CLI::App* active = parsed.empty() ? nullptr : parsed.front();

        if (active == simulate) {
            const ddelab::SimulateResult result = ddelab::run_simulate(sim, opts);
            std::fputs(ddelab::to_table_string(result.report).c_str(), stdout);
            print_files(result.files);
            return 0;
        }
        if (active == figure) {
            const ddelab::FigureResult result = ddelab::run_figure(figure_name, opts);
            for (const auto& run : result.runs)
                std::printf("delta=%-10g %s (t_stop=%.6g)\n", run.delta,
                            to_string(run.report.classification), run.report.t_stop);
            print_files(result.files);
            return 0;
        }
        if (active == verify) {
            const ddelab::VerifyResult result = ddelab::run_verify(verify_params, opts);
            std::fputs(ddelab::to_table_string(result.report).c_str(), stdout);
            print_files(result.files);
            return result.report.all_passed ? 0 : 1;
        }
        if (active == periodic) {
            const ddelab::PeriodicResult result = ddelab::run_periodic(per, opts);
            std::printf("%4s %22s %22s %12s %10s %10s%s\n", "n", "omega", "r", "r4tau",
                        "res1", "res2", per.seed_run ? "      drift" : "");
            for (const auto& row : result.rows) {
                std::printf("%4d %22.15g %22.15g %12.6g %10.2e %10.2e", row.point.n,
                            row.point.omega, row.point.r, row.point.r4tau(),
                            row.residual.res1, row.residual.res2);
                if (row.drift)
                    std::printf(" %10.2e", *row.drift);
                std::printf("\n");
            }
            print_files(result.files);
            return 0;
        }
        if (active == threshold) {
            const ddelab::ThresholdRunResult result = ddelab::run_threshold(thr, opts);
            for (const auto& probe : result.result.probes)
                std::printf("delta=%-18.12g %s\n", probe.delta,
                            to_string(probe.classification));
            std::printf("threshold in [%.12g, %.12g], width %.3g\n", result.result.delta_lo,
                        result.result.delta_hi,
                        result.result.delta_hi - result.result.delta_lo);
            print_files(result.files);
            return 0;
        }
        std::fputs("error: no subcommand given\n", stderr);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        std::fprintf(stderr, "error: %s\n", what.c_str());
        return what.rfind("bracket invalid", 0) == 0 ? 1 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
