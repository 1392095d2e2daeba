#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddelab/blowup.hpp"
#include "ddelab/branches.hpp"
#include "ddelab/harness.hpp"
#include "ddelab/model.hpp"

namespace py = pybind11;

namespace {

py::object opt(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict report_dict(const ddelab::BlowupReport& report) {
    py::dict d;
    d["classification"] = to_string(report.classification);
    d["status"] = to_string(report.status);
    d["T_est"] = opt(report.T_est);
    d["r_last"] = report.r_last;
    d["t_stop"] = report.t_stop;
    d["extrapolation_points"] = report.extrapolation_points;
    return d;
}

ddelab::IntegratorOptions make_options(double rel_tol, double abs_tol, double r_max) {
    ddelab::IntegratorOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.r_max = r_max;
    return opts;
}

}  // namespace

PYBIND11_MODULE(_ddelab, m) {
    m.doc() = "planar oscillator with delayed cubic damping: integration, blow-up "
              "analysis, equilibrium branches";

    m.def("alpha_constant", &ddelab::alpha_constant,
          "the radius growth factor ((2-sqrt2)/(2+sqrt2))^(1/(2 sqrt2))");

    m.def("nondelay_exact_radius", &ddelab::nondelay_exact_radius, py::arg("r0"),
          py::arg("t"), "closed-form radius of the tau = 0 system");

    m.def(
        "simulate",
        [](double tau, double delta, double r0, const std::string& form, double horizon,
           double rel_tol, double abs_tol, double r_max) {
            ddelab::SimulateSpec spec;
            spec.tau = tau;
            spec.delta = delta;
            spec.r0 = r0;
            spec.form = form;
            const ddelab::SimulatedRun run = ddelab::simulate_trajectory(
                spec, make_options(rel_tol, abs_tol, r_max), horizon);

            py::dict d = report_dict(run.report);
            const auto& knots = run.traj.knots();
            std::vector<double> xs, ys, rs, thetas;
            xs.reserve(knots.size());
            ys.reserve(knots.size());
            rs.reserve(knots.size());
            std::vector<double> state(2);
            if (run.polar_form) {
                for (double t : knots) {
                    run.traj.eval(t, state);
                    const ddelab::CartesianState c =
                        ddelab::to_cartesian({state[0], state[1]});
                    rs.push_back(state[0]);
                    thetas.push_back(state[1]);
                    xs.push_back(c.x);
                    ys.push_back(c.y);
                }
            } else {
                const std::vector<ddelab::PolarState> polar =
                    ddelab::polar_samples(run.traj, knots);
                for (std::size_t i = 0; i < knots.size(); ++i) {
                    run.traj.eval(knots[i], state);
                    xs.push_back(state[0]);
                    ys.push_back(state[1]);
                    rs.push_back(polar[i].r);
                    thetas.push_back(polar[i].theta);
                }
            }
            d["t"] = knots;
            d["x"] = std::move(xs);
            d["y"] = std::move(ys);
            d["r"] = std::move(rs);
            d["theta"] = std::move(thetas);
            return d;
        },
        py::arg("tau") = 1.0, py::arg("delta") = 1.0, py::arg("r0") = 0.1,
        py::arg("form") = "cartesian", py::arg("horizon") = 100.0,
        py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12, py::arg("r_max") = 1e8,
        "integrate one run and classify it; returns the report plus the "
        "trajectory sampled at the accepted steps");

    m.def(
        "verify_theorem1",
        [](double tau, double delta, double horizon, double rel_tol, double abs_tol,
           double r_max) {
            const ddelab::BoundsReport report = ddelab::verify_theorem1_bounds(
                {tau, delta}, horizon, make_options(rel_tol, abs_tol, r_max));
            py::dict d;
            d["delta"] = report.delta;
            d["tau"] = report.tau;
            d["tau_prime"] = report.tau_prime;
            d["alpha_delta"] = report.alpha_delta;
            d["classification"] = to_string(report.classification);
            d["t_quarter"] = opt(report.t_quarter);
            d["r_at_quarter"] = opt(report.r_at_quarter);
            d["t_zero"] = opt(report.t_zero);
            d["T_est"] = opt(report.T_est);
            py::list checks;
            for (const auto& c : report.checks) {
                py::dict cd;
                cd["name"] = c.name;
                cd["applicable"] = c.applicable;
                cd["passed"] = c.passed;
                cd["lhs"] = c.lhs;
                cd["rhs"] = c.rhs;
                checks.append(cd);
            }
            d["checks"] = checks;
            d["all_passed"] = report.all_passed;
            return d;
        },
        py::arg("tau") = 1.0, py::arg("delta") = 100.0, py::arg("horizon") = 100.0,
        py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12, py::arg("r_max") = 1e8,
        "run the ramp setup and evaluate the quantitative blow-up bounds");

    m.def(
        "equilibria",
        [](double tau, int n_max) {
            py::list rows;
            for (const auto& p : ddelab::enumerate_equilibria(tau, n_max)) {
                const ddelab::EquilibriumResidual res = ddelab::equilibrium_residual(p);
                py::dict d;
                d["n"] = p.n;
                d["omega"] = p.omega;
                d["r"] = p.r;
                d["tau"] = p.tau;
                d["r4tau"] = p.r4tau();
                d["res1"] = res.res1;
                d["res2"] = res.res2;
                rows.append(d);
            }
            return rows;
        },
        py::arg("tau"), py::arg("n_max") = 3,
        "all equilibria of the polar-frequency system with |n| <= n_max");

    m.def(
        "k0_maximum",
        [] {
            const ddelab::BranchFold fold = ddelab::k0_maximum();
            py::dict d;
            d["omega_star"] = fold.omega_star;
            d["tau_star"] = fold.tau_star;
            return d;
        },
        "fold of the n = 0 branch: the largest delay it reaches");

    m.def(
        "seeded_drift",
        [](int n, double omega, double r, double tau, double span) {
            return ddelab::seeded_drift({n, omega, r, tau}, span);
        },
        py::arg("n"), py::arg("omega"), py::arg("r"), py::arg("tau"), py::arg("span"),
        "max |r(t) - r*| for a polar run seeded at an equilibrium");

    m.def(
        "threshold_search",
        [](double tau, double lo, double hi, double tol, double horizon, double rel_tol,
           double abs_tol, double r_max) {
            const ddelab::ThresholdResult res = ddelab::threshold_search(
                tau, lo, hi, tol, horizon, make_options(rel_tol, abs_tol, r_max));
            py::dict d;
            d["delta_lo"] = res.delta_lo;
            d["delta_hi"] = res.delta_hi;
            py::list probes;
            for (const auto& p : res.probes) {
                py::dict pd;
                pd["delta"] = p.delta;
                pd["classification"] = to_string(p.classification);
                probes.append(pd);
            }
            d["probes"] = probes;
            return d;
        },
        py::arg("tau"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 0.01,
        py::arg("horizon") = 100.0, py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12,
        py::arg("r_max") = 1e8,
        "bisect the blow-up threshold in delta between a bounded lower endpoint "
        "and a blowing-up upper endpoint");
}
