import math

import ddelab


def test_alpha_constant():
    closed = ((2 - math.sqrt(2)) / (2 + math.sqrt(2))) ** (1 / (2 * math.sqrt(2)))
    assert abs(ddelab.alpha_constant() - closed) < 1e-15


def test_nondelay_radius_oracle():
    # r0=2, t=1: 2e/sqrt(1 + 4(e^2 - 1))
    want = 2 * math.e / math.sqrt(1 + 4 * (math.e**2 - 1))
    assert abs(ddelab.nondelay_exact_radius(2.0, 1.0) - want) < 1e-15


def test_simulate_without_delay_matches_closed_form():
    out = ddelab.simulate(tau=0.0, r0=0.1, horizon=10.0)
    assert out["classification"] == "bounded"
    err = max(
        abs(r - ddelab.nondelay_exact_radius(0.1, t))
        for t, r in zip(out["t"], out["r"])
    )
    assert err < 1e-8


def test_simulate_blowup():
    out = ddelab.simulate(tau=1.0, delta=5.0)
    assert out["classification"] == "blow-up"
    assert out["T_est"] is not None and out["T_est"] < 1.0


def test_equilibria_residuals():
    pts = ddelab.equilibria(1.0, 3)
    assert len(pts) >= 6
    worst = max(max(abs(p["res1"]), abs(p["res2"])) for p in pts)
    assert worst < 1e-10


def test_k0_maximum_fold_identity():
    fold = ddelab.k0_maximum()
    assert 2.0 < fold["omega_star"] < 3.0
    r4 = (fold["omega_star"] - 1) ** 2 + 1
    assert abs(r4 * fold["tau_star"] - 1.0) < 1e-8


def test_verify_theorem1_large_delta():
    report = ddelab.verify_theorem1(tau=1.0, delta=100.0)
    assert report["all_passed"]
    assert report["classification"] == "blow-up"
    assert report["t_quarter"] <= 0.25
    assert report["r_at_quarter"] >= report["alpha_delta"]


def test_seeded_drift_small():
    pts = ddelab.equilibria(0.2, 0)
    branch = [p for p in pts if 0 < p["omega"] < 2.0]
    assert len(branch) == 1
    p = branch[0]
    drift = ddelab.seeded_drift(p["n"], p["omega"], p["r"], p["tau"], 5 * p["tau"])
    assert drift < 1e-6
