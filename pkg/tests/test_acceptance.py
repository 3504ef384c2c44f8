"""Acceptance criteria 1 to 9.

Each test appends one "criterion N: PASS|FAIL ..." line to
conftest.ACCEPTANCE_LINES (printed in the terminal summary) before asserting.
"""

import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import conftest
from conftest import fig4, random_scenario, section5
from uavrelay.channel import Scenario, sir_chain, sir_hop1, sir_hop2
from uavrelay.cli import main
from uavrelay.distributed import CONVERGED, DistributedConfig, run_distributed
from uavrelay.errors import InfeasibleGamma
from uavrelay.locus import locus_heights, quartic_residual, quartic_roots_fixed_h, stationary_points
from uavrelay.multi import PlanRequest, max_gamma_for_n, plan_min_uavs
from uavrelay.oracles import (GridSpec, dp_min_uavs, grid_argmax_single, msi_blind_baseline,
                              random_placement_baseline)
from uavrelay.scenario_io import ScenarioFile, SweepBlock, dumps
from uavrelay.single import optimal_position_free, optimal_x_fixed_h

H5 = 20.0


def record(n: int, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def _n_star(sc, g_db, h=H5):
    try:
        return plan_min_uavs(PlanRequest(10 ** (g_db / 10), h, sc)).n_uavs
    except InfeasibleGamma:
        return math.inf


# --- 1 ----------------------------------------------------------------------------

def test_criterion_1_closed_form_vs_grid():
    rng = np.random.default_rng(2024)
    scenarios = [random_scenario(rng) for _ in range(200)]
    t0 = time.perf_counter()
    worst = math.inf
    for sc in scenarios:
        th = optimal_position_free(sc).sir.sir_system
        gr = grid_argmax_single(sc, GridSpec(0.25, 0.25)).sir.sir_system
        worst = min(worst, th / gr)
    elapsed = time.perf_counter() - t0
    ok = worst >= 1 - 1e-6 and elapsed < 60
    record(1, ok, f"200 scenarios, min closed-form/grid = {worst:.9f} (need >= 1-1e-6), "
                  f"{elapsed:.1f} s (need < 60 s)")


# --- 2 ----------------------------------------------------------------------------

def test_criterion_2_locus_residual():
    rng = np.random.default_rng(7)
    worst, n_pts, n_sc = 0.0, 0, 0
    while n_sc < 50:
        sc = random_scenario(rng).with_(altitude_min_m=0.5, altitude_max_m=500.0)
        pts = []
        for x in rng.uniform(0, sc.D, 2000):
            pts.extend(locus_heights(sc, float(x)))
            if len(pts) >= 200:
                break
        if len(pts) < 200:
            continue
        n_sc += 1
        for p in pts[:200]:
            s1, s2 = float(sir_hop1(sc, p.x_m, p.h_m)), float(sir_hop2(sc, p.x_m, p.h_m))
            worst = max(worst, abs(s1 - s2) / s1)
            n_pts += 1
    record(2, n_pts == 10_000 and worst <= 1e-9,
           f"{n_pts} locus points over {n_sc} scenarios, max |SIR_1-SIR_2|/SIR_1 = {worst:.3e} (need <= 1e-9)")


# --- 3 ----------------------------------------------------------------------------

def test_criterion_3_quartic_completeness():
    rng = np.random.default_rng(11)
    missed, worst_res, n_changes = 0, 0.0, 0
    for _ in range(100):
        sc = random_scenario(rng)
        h = float(rng.uniform(sc.h_min, sc.h_max))
        roots = quartic_roots_fixed_h(sc, h)
        xs = np.linspace(0, sc.D, 1001)
        f = sir_hop1(sc, xs, h) - sir_hop2(sc, xs, h)
        for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
            n_changes += 1
            a, b = xs[i], xs[i + 1]
            if not any(a - 1e-9 * sc.D <= r <= b + 1e-9 * sc.D for r in roots):
                missed += 1
        for r in roots:
            worst_res = max(worst_res, quartic_residual(sc, h, r))
    record(3, missed == 0 and worst_res <= 1e-8,
           f"100 scenarios, {n_changes} sign changes, {missed} without a root, "
           f"max normalized residual {worst_res:.2e} (need <= 1e-8)")


# --- 4 ----------------------------------------------------------------------------

def test_criterion_4_fig4_gains():
    # two realizations, p_t in {1, 2} W with p_u = p_MSI = 1 W
    heights = [10.0 + 5 * i for i in range(9)]
    beats_all = True
    gain_h10 = {}
    gains_random = []
    for pt in (1.0, 2.0):
        sc = fig4(pt)
        for h in heights:
            th = optimal_x_fixed_h(sc, h).sir.sir_system
            blind = msi_blind_baseline(sc, h).sir.sir_system
            rnd = random_placement_baseline(sc, 1, 1000, 0, h).mean_sir
            beats_all &= th > blind and th > rnd
            if h == 10.0:
                gain_h10[pt] = 100 * (th / blind - 1)
            gains_random.append(100 * (th / rnd - 1))
    peak = max(gain_h10.values())
    mean_random = math.fsum(gains_random) / len(gains_random)
    ok = beats_all and peak >= 40 and abs(mean_random - 30.14) <= 10
    record(4, ok, f"beats both baselines at all altitudes: {beats_all}; gain vs MSI-blind at h=10: "
                  f"{gain_h10[1.0]:.1f}% (p_t=1), {gain_h10[2.0]:.1f}% (p_t=2), peak need >= 40%; "
                  f"mean gain vs random {mean_random:.2f}% (need 30.14 +- 10)")


# --- 5 ----------------------------------------------------------------------------

def test_criterion_5_trends_and_validity():
    sc = section5()
    gammas = np.arange(-5.0, 11.0 + 1e-9, 0.5)
    problems = []
    counts = [_n_star(sc, g) for g in gammas]
    if counts != sorted(counts):
        problems.append("N* not a staircase in gamma")
    by_y = {y: [_n_star(sc.with_(msi_y_m=y), g) for g in gammas] for y in (400.0, 200.0, 100.0)}
    for g_i in range(len(gammas)):
        seq = [by_y[y][g_i] for y in (400.0, 200.0, 100.0)]
        if seq != sorted(seq):
            problems.append(f"MSI closer lowered N* at {gammas[g_i]} dB")
    for g in gammas:
        seq = [_n_star(sc.with_(power_uav_w=p), g) for p in (0.5, 1.0, 2.0)]
        if seq != sorted(seq, reverse=True):
            problems.append(f"higher p_u raised N* at {g} dB")
    n_plans = 0
    for s in [sc] + [sc.with_(msi_y_m=y) for y in (200.0, 100.0)] + \
             [sc.with_(power_uav_w=p) for p in (0.5, 2.0)]:
        for g_db in gammas:
            g = 10 ** (g_db / 10)
            try:
                plan = plan_min_uavs(PlanRequest(g, H5, s))
            except InfeasibleGamma:
                continue
            n_plans += 1
            sirs = sir_chain(s, plan.hop_distances_m, H5)
            if min(sirs) < g * (1 - 1e-9) or abs(math.fsum(plan.hop_distances_m) - s.D) > 1e-9 * s.D:
                problems.append(f"invalid plan at {g_db} dB")
    record(5, not problems,
           f"staircase {counts[0]}..{counts[-1]} UAVs over {len(gammas)} targets, "
           f"{n_plans} plans checked; " + ("; ".join(problems[:3]) or "all trends hold"))


# --- 6 ----------------------------------------------------------------------------

def test_criterion_6_minimality_vs_dp():
    sc = section5()
    gammas = np.linspace(-5.0, 11.0, 30)
    off, not_minimal, diffs = 0, 0, []
    for g_db in gammas:
        g = 10 ** (g_db / 10)
        plan = plan_min_uavs(PlanRequest(g, H5, sc))
        dp = dp_min_uavs(sc, g, H5, 1.0)
        diffs.append(dp - plan.n_uavs)
        if not plan.n_uavs <= dp <= plan.n_uavs + 1:
            off += 1
        if plan.n_uavs >= 2:
            try:
                plan_min_uavs(PlanRequest(g, H5, sc), max_uavs=plan.n_uavs - 1)
                not_minimal += 1
            except InfeasibleGamma:
                pass
    record(6, off == 0 and not_minimal == 0,
           f"30 targets, dp - planner in {sorted(set(diffs))} (need within +1), "
           f"{not_minimal} plans survive N*-1")


# --- 7 ----------------------------------------------------------------------------

def test_criterion_7_distributed_trend():
    sc = section5(min_uav_spacing_m=4.0)
    results = {}
    for n in (8, 12, 16):
        tr = run_distributed(DistributedConfig(n, 3.0, H5, sc))
        central, _ = max_gamma_for_n(sc, n, H5)
        results[n] = (tr.outcome, tr.final_sir_system, tr.iterations, central)
    outs = [results[n] for n in (8, 12, 16)]
    converged = all(o[0] == CONVERGED for o in outs)
    sirs = [o[1] for o in outs]
    its = [o[2] for o in outs]
    bounded = all(o[1] <= o[3] * (1 + 1e-9) for o in outs)
    ok = converged and sirs == sorted(sirs) and its == sorted(its, reverse=True) and bounded
    record(7, ok, "N=8/12/16: " + ", ".join(
        f"{o[0]} SIR {o[1]:.6g} in {o[2]} it (central {o[3]:.6g})" for o in outs))


# --- 8 ----------------------------------------------------------------------------

def test_criterion_8_derivative_signs():
    rng = np.random.default_rng(13)
    checked, bad = 0, 0
    while checked < 10_000:
        sc = random_scenario(rng)
        D = sc.D
        x = float(rng.uniform(0, D))
        h = float(rng.uniform(sc.h_min, sc.h_max))
        sp = stationary_points(sc, h)
        guard = 1e-3 * D
        if min(abs(x - sp.psi_x_m), abs(x - sp.psi_h_m), x, D - x) < guard:
            continue
        if min(h - sc.h_min, sc.h_max - h) < 1e-3 * D:
            continue
        dx = dh = 1e-5 * D
        d1x = float(sir_hop1(sc, x + dx, h) - sir_hop1(sc, x - dx, h))
        d1h = float(sir_hop1(sc, x, h + dh) - sir_hop1(sc, x, h - dh))
        d2x = float(sir_hop2(sc, x + dx, h) - sir_hop2(sc, x - dx, h))
        d2h = float(sir_hop2(sc, x, h + dh) - sir_hop2(sc, x, h - dh))
        good = ((d1x >= 0) == (x >= sp.psi_x_m) and (d1h >= 0) == (x >= sp.psi_h_m)
                and d2x >= 0 and d2h <= 0)
        bad += not good
        checked += 1
    record(8, bad == 0, f"{checked} points, {bad} sign-rule violations")


# --- 9 ----------------------------------------------------------------------------

def _cli_bytes(tmp_path, name, argv):
    dest = tmp_path / f"{name}.csv"
    code = main([*argv, "--out", str(dest)], io.StringIO(), io.StringIO())
    return code, dest.read_bytes()


def test_criterion_9_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("UAVRELAY_OUT_DIR", raising=False)
    s4 = tmp_path / "fig4.json"
    s4.write_text(dumps(ScenarioFile(fig4(), {"trials": 300, "seed": 3},
                                     (SweepBlock("altitude_m", (10.0, 30.0)),))))
    s5 = tmp_path / "s5.json"
    s5.write_text(dumps(ScenarioFile(section5(), {"altitude_m": 20.0, "n_uavs": 4, "trials": 50},
                                     (SweepBlock("gamma_db", (0.0, 6.0)),))))
    cases = {
        "single": ["single", "--scenario", str(s4), "--mode", "free"],
        "fixed-h": ["single", "--scenario", str(s4), "--mode", "fixed-h", "--altitude", "20"],
        "oracle": ["oracle", "--scenario", str(s4), "--grid-x", "0.5", "--grid-h", "0.5"],
        "plan": ["plan", "--scenario", str(s5), "--gamma-db", "6", "--altitude", "20"],
        "distributed": ["distributed", "--scenario", str(s5), "--n", "6", "--epsilon", "3"],
        "sweep-compare": ["sweep", "--scenario", str(s4), "--mode", "compare-single"],
        "sweep-plan": ["sweep", "--scenario", str(s5), "--mode", "plan"],
        "sweep-dist": ["sweep", "--scenario", str(s5), "--mode", "compare-distributed"],
    }
    differing = []
    for name, argv in cases.items():
        a = _cli_bytes(tmp_path, name + "-a", argv)
        b = _cli_bytes(tmp_path, name + "-b", argv)
        if a != b or a[0] != 0:
            differing.append(name)
    # separate interpreter processes as well
    outs = [subprocess.run([sys.executable, "-m", "uavrelay.cli", "sweep", "--scenario", str(s4),
                            "--mode", "compare-single"], capture_output=True).stdout for _ in range(2)]
    if outs[0] != outs[1] or not outs[0]:
        differing.append("subprocess-sweep")
    record(9, not differing, f"{len(cases) + 1} command runs repeated; "
                             f"differing: {', '.join(differing) or 'none'}")
