"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The long runs are
shared through session fixtures; the whole suite is a few minutes.
"""

import math

import numpy as np
import pytest

import ns1d
from ns1d.core import ALPHA_UPPER, Params, alpha_check
from ns1d.diagnostics import DIAG_FIELDS
from ns1d.inequalities import CknCase, ckn_ratio, dilated, gaussian, hardy_best_constant_probe
from ns1d.output import emit_snapshot, emit_timeseries
from ns1d.solver import InitialProfile, build_initial_data, cfl_dt, run, step
from ns1d.trajectories import momentum_potential_residual


def _report(num, name, ok, detail=""):
    print("\nACCEPTANCE %02d %-34s %s  %s" % (num, name, "PASS" if ok else "FAIL", detail))
    assert ok, "criterion %d (%s): %s" % (num, name, detail)


REFERENCE_PROFILE = InitialProfile(background=0.25)          # vacuum-free bump
VACUUM_PROFILE = InitialProfile()                            # compactly supported
COLLAPSE_PROFILE = InitialProfile(velocity_kind="sine_in_support",
                                  velocity_amplitude=-0.5)


def reference_params(n, t_end=0.5, diag_every=1):
    return Params(gamma=2.0, beta=1.0, half_width=10.0, n_cells=n,
                  t_end=t_end, diag_every=diag_every)


@pytest.fixture(scope="session")
def reference_runs():
    out = {}
    for n, cadence in ((256, 1), (512, 1), (1024, 4)):
        out[n] = run(reference_params(n, diag_every=cadence), REFERENCE_PROFILE)
    return out


@pytest.fixture(scope="session")
def vacuum_run():
    params = Params(n_cells=1024, half_width=10.0, t_end=1.0, diag_every=10)
    return run(params, VACUUM_PROFILE)


@pytest.fixture(scope="session")
def collapse_run():
    params = Params(n_cells=2048, half_width=10.0, t_end=1.0, diag_every=50)
    return run(params, COLLAPSE_PROFILE)


def test_criterion_1_mass_conservation(reference_runs):
    a = reference_runs[512].audits
    ok = a["mass_drift"] <= 1e-12 and a["wall_time"] < 10.0
    _report(1, "mass conservation + runtime",
            ok, "drift=%.3e wall=%.2fs" % (a["mass_drift"], a["wall_time"]))


def test_criterion_2_energy_identity(reference_runs):
    a1024 = reference_runs[1024].audits
    e0 = a1024["energy_initial"]
    monotone_ok = a1024["max_energy_increase"] <= 1e-8 * e0
    sums = {n: reference_runs[n].audits["energy_identity_residual_sum"]
            for n in (256, 512, 1024)}
    o1 = math.log2(sums[256] / sums[512])
    o2 = math.log2(sums[512] / sums[1024])
    ok = monotone_ok and o1 >= 1.0 and o2 >= 1.0
    _report(2, "discrete energy identity", ok,
            "max_up=%.2e (tol %.2e) orders=%.3f %.3f"
            % (a1024["max_energy_increase"], 1e-8 * e0, o1, o2))


def test_criterion_3_density_bound_mechanism(collapse_run):
    a = collapse_run.audits
    drift_ok = a["sup_xi_eta_drift"] <= 1e-3 and a["particle_drift"] <= 1e-3
    cap_ok = a["max_rho"] <= a["rho_cap"] * (1.0 + 1e-3)
    no_cap_violation = not any(v.kind == "density_cap" for v in collapse_run.violations)
    ok = drift_ok and cap_ok and no_cap_violation and a["aborted"] == ""
    _report(3, "transported-potential bound", ok,
            "sup_drift=%.2e particle_drift=%.2e max_rho=%.4f cap=%.4f"
            % (a["sup_xi_eta_drift"], a["particle_drift"], a["max_rho"], a["rho_cap"]))


def _running_maxes(result):
    maxes = {}
    for rec in result.records:
        for name in DIAG_FIELDS:
            if name == "t":
                continue
            v = getattr(rec, name)
            if math.isfinite(v):
                maxes[name] = max(maxes.get(name, 0.0), abs(v))
    return maxes


def test_criterion_4_boundedness_stability(reference_runs):
    m512 = _running_maxes(reference_runs[512])
    m1024 = _running_maxes(reference_runs[1024])
    finite_ok = True
    for result in (reference_runs[512], reference_runs[1024]):
        for rec in result.records[2:]:
            for name in DIAG_FIELDS:
                if not math.isfinite(getattr(rec, name)):
                    finite_ok = False
    worst = ("", 0.0)
    stable_ok = True
    for name in DIAG_FIELDS:
        if name == "t":
            continue
        a, b = m512.get(name, 0.0), m1024.get(name, 0.0)
        scale = max(abs(a), abs(b))
        if scale <= 1e-10:
            continue
        rel = abs(a - b) / scale
        if rel > worst[1]:
            worst = (name, rel)
        if rel >= 0.2:
            stable_ok = False
    ok = finite_ok and stable_ok
    _report(4, "boundedness across resolutions", ok,
            "all finite=%s worst field %s at %.1f%%" % (finite_ok, worst[0], 100 * worst[1]))


def _integrate_for_pair(params, profile):
    grid = params.grid()
    state, _ = build_initial_data(profile, grid, params)
    prev = None
    while state.t < params.t_end - 1e-14:
        dt = min(cfl_dt(state, grid, params), params.t_end - state.t)
        prev = state
        state = step(state, dt, grid, params)
    return prev, state, grid


def test_criterion_5_residual_refinement():
    profile = InitialProfile(background=0.01, velocity_kind="sine_in_support",
                             velocity_amplitude=-0.3)
    rb, rg, rc3 = {}, {}, {}
    for n in (256, 512, 1024):
        params = Params(n_cells=n, half_width=10.0, t_end=0.05, visc_ref_frac=0.005)
        prev, nxt, grid = _integrate_for_pair(params, profile)
        rb[n], rg[n] = ns1d.transport_residuals(prev, nxt, grid, params)
        _, _, rc3[n] = momentum_potential_residual(prev, nxt, grid, params)
    factors = []
    for series in (rb, rg, rc3):
        factors.append(series[256] / series[512])
        factors.append(series[512] / series[1024])
    ok = all(1.5 <= f <= 3.0 for f in factors)
    _report(5, "residual refinement factors", ok,
            "beta %.2f %.2f | gamma %.2f %.2f | identity %.2f %.2f" % tuple(factors))


def test_criterion_6_self_convergence():
    sols = {}
    for n in (256, 512, 1024):
        params = Params(n_cells=n, half_width=10.0, t_end=0.1, diag_every=10_000)
        sols[n] = run(params, REFERENCE_PROFILE).final_state.rho
    restrict = lambda f: 0.5 * (f[0::2] + f[1::2])
    d1 = float(np.abs(restrict(sols[512]) - sols[256]).sum() * (20.0 / 256))
    d2 = float(np.abs(restrict(sols[1024]) - sols[512]).sum() * (20.0 / 512))
    order = math.log2(d1 / d2)
    ok = order >= 0.8
    _report(6, "L1 self-convergence", ok, "order=%.3f" % order)


def test_criterion_7_weighted_inequalities():
    g_ratio = ckn_ratio(CknCase.hardy(1.0), gaussian())
    gauss_ok = abs(g_ratio - 1.154701) <= 1e-6

    sup_ok = True
    discrepancy_reported = False
    details = []
    for a in (0.75, 1.0, 1.5, 2.0):
        rep = hardy_best_constant_probe(a, family_size=1000, seed=0)
        details.append("a=%.2f sup=%.4f/%.4f" % (a, rep.sup_ratio, rep.bound_derived))
        if rep.sup_ratio > rep.bound_derived + 1e-6:
            sup_ok = False
        # the report must carry both candidate constants and flag the clash
        if rep.paper_bound_exceeded and rep.bound_paper < rep.bound_derived:
            discrepancy_reported = True

    base = ckn_ratio(CknCase.hardy(1.0), gaussian())
    dil_ok = all(
        abs(ckn_ratio(CknCase.hardy(1.0), dilated(gaussian(), lam)) - base)
        <= 1e-8 * base
        for lam in (0.5, 2.0, 10.0)
    )
    ok = gauss_ok and sup_ok and dil_ok and discrepancy_reported
    _report(7, "weighted-inequality harness", ok,
            "gaussian=%.8f dilation=%s %s" % (g_ratio, dil_ok, "; ".join(details)))


def test_criterion_8_alpha_algebra():
    endpoint_ok = abs(ALPHA_UPPER - 2.456828) <= 1e-5
    verdicts = {
        2.0: False, 2.3: True, 2.45: True, 2.46: False,
    }
    verdict_ok = all(alpha_check(a).admissible == want for a, want in verdicts.items())
    scan_ok = True
    for a in np.linspace(2.0 + 1e-9, ALPHA_UPPER - 1e-9, 10_000):
        rep = alpha_check(a)
        if not (rep.admissible and rep.theta < 2.0 / 3.0 and rep.coeff < 1.0):
            scan_ok = False
            break
    ok = endpoint_ok and verdict_ok and scan_ok
    _report(8, "weight-exponent algebra", ok,
            "endpoint=%.6f verdicts=%s scan=%s" % (ALPHA_UPPER, verdict_ok, scan_ok))


def test_criterion_9_vacuum_robustness(vacuum_run):
    a = vacuum_run.audits
    completed = a["aborted"] == "" and vacuum_run.final_state.t == pytest.approx(1.0)
    nonneg = a["min_rho"] >= 0.0
    finite = all(
        math.isfinite(getattr(rec, name))
        for rec in vacuum_run.records[2:]
        for name in DIAG_FIELDS
    )
    interp_ok = a["max_interp_ratio"] <= 1.0 + 1e-6
    ok = completed and nonneg and finite and interp_ok
    _report(9, "vacuum robustness", ok,
            "completed=%s min_rho=%.2e interp=%.8f" % (completed, a["min_rho"], a["max_interp_ratio"]))


def test_criterion_10_determinism(reference_runs, tmp_path):
    first = reference_runs[512]
    second = run(reference_params(512), REFERENCE_PROFILE)
    p1 = emit_timeseries(first.records, tmp_path / "a.csv")
    p2 = emit_timeseries(second.records, tmp_path / "b.csv")
    ts_ok = p1.read_bytes() == p2.read_bytes()
    grid = reference_params(512).grid()
    s1 = emit_snapshot(first.final_state, grid, tmp_path / "sa.csv")
    s2 = emit_snapshot(second.final_state, grid, tmp_path / "sb.csv")
    snap_ok = s1.read_bytes() == s2.read_bytes()
    ok = ts_ok and snap_ok
    _report(10, "byte-identical reruns", ok,
            "timeseries=%s snapshot=%s" % (ts_ok, snap_ok))
