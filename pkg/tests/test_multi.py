import math

import numpy as np
import pytest

from uavrelay.channel import Scenario, sir_chain, sir_rx_hop, sir_tx_hop, sir_uav_hop
from uavrelay.errors import InfeasibleGamma, NegativeRadicand
from uavrelay.locus import stationary_points
from uavrelay.multi import (PlanRequest, feasibility_bound, feasibility_terms, first_hop_distance,
                            last_hop_distance, max_gamma_for_n, middle_hop_distance, plan_min_uavs)
from uavrelay.oracles import bisect_sir_equals, dp_min_uavs
from uavrelay.single import optimal_x_fixed_h

from conftest import fig4, section5

H = 20.0


def _check_plan(plan, sc, gamma):
    assert math.fsum(plan.hop_distances_m) == pytest.approx(sc.D, rel=1e-9)
    assert all(b > a for a, b in zip(plan.uav_x_m, plan.uav_x_m[1:]))
    for d in plan.hop_distances_m[1:-1]:
        assert d >= sc.min_uav_spacing_m * (1 - 1e-9)
    sirs = sir_chain(sc, plan.hop_distances_m, plan.altitude_m)
    assert sirs == pytest.approx(list(plan.sir_profile), rel=1e-12)
    assert min(sirs) >= gamma * (1 - 1e-9)
    assert plan.sir_system == min(plan.sir_profile)
    assert plan.n_uavs == len(plan.uav_x_m)


# --- feasibility bound ------------------------------------------------------------

def test_bound_tx_term_in_high_power_limit(sc5):
    sc = sc5.with_(power_uav_w=1e12)
    terms = feasibility_terms(sc, H)
    assert feasibility_bound(sc, H) == terms["tx_hop"]
    assert terms["tx_hop"] == pytest.approx(80 * (500 ** 2 + 400 ** 2 + H * H) / (80 * H * H))


def test_bound_section5_covers_fig5_sweep(sc5):
    bound = feasibility_bound(sc5, H)
    assert bound > 10 ** (11 / 10)
    terms = feasibility_terms(sc5, H)
    assert bound == min(terms.values())


def test_bound_strict_form_differs_only_in_uav_term(sc5):
    a = feasibility_terms(sc5, H)
    b = feasibility_terms(sc5, H, unsquared_uav_term=True)
    assert a["tx_hop"] == b["tx_hop"] and a["rx_hop"] == b["rx_hop"]
    assert a["uav_hop"] > b["uav_hop"]


def test_above_bound_names_binding_term(sc5):
    terms = feasibility_terms(sc5, H)
    name = min(terms, key=terms.get)
    with pytest.raises(InfeasibleGamma) as exc:
        plan_min_uavs(PlanRequest(terms[name] * 1.01, H, sc5))
    assert exc.value.term == name


# --- end hops ---------------------------------------------------------------------

def test_first_hop_degenerate_gamma(sc5):
    # gamma = p_t / p_MSI makes the quadratic linear
    d = first_hop_distance(PlanRequest(80.0 / 80.0, H, sc5))
    assert d == pytest.approx(stationary_points(sc5, H).psi_h_m, rel=1e-12)


def test_first_hop_tiny_gamma_reaches_rx(sc5):
    req = PlanRequest(1e-6, H, sc5)
    assert first_hop_distance(req) == sc5.D
    plan = plan_min_uavs(req)
    assert plan.n_uavs == 1 and plan.uav_x_m == (sc5.D,)


def test_first_hop_matches_bisection(sc5):
    g = 10.0
    d = first_hop_distance(PlanRequest(g, H, sc5))
    hi = min(sc5.D, stationary_points(sc5, H).psi_x_m)
    ref = bisect_sir_equals(g, lambda v: float(sir_tx_hop(sc5, v, H)), (0.0, hi))
    assert d == pytest.approx(ref, rel=1e-9)


def test_last_hop_equals_altitude():
    # eta = mu_NLoS, p_u = p_MSI, gamma = 1, (X - D)^2 + Y^2 = 2 h^2
    sc = Scenario(100.0, 90.0, 10.0, 1.0, 1.0, 1.0, 5.0, 20.0)
    assert last_hop_distance(PlanRequest(1.0, 10.0, sc)) == pytest.approx(10.0, rel=1e-12)
    ref = bisect_sir_equals(1.0, lambda v: float(sir_rx_hop(sc, v, 10.0)), (0.0, 100.0))
    assert ref == pytest.approx(10.0, rel=1e-9)


def test_last_hop_zero_radicand():
    sc = Scenario(100.0, 90.0, 10.0, 1.0, 1.0, 1.0, 5.0, 20.0)
    g = sc.rx_msi_sq / 100.0
    assert last_hop_distance(PlanRequest(g, 10.0, sc)) == 0.0
    with pytest.raises(NegativeRadicand) as exc:
        last_hop_distance(PlanRequest(g * 1.01, 10.0, sc))
    assert exc.value.term == "rx_hop"
    assert isinstance(exc.value, InfeasibleGamma)


def test_last_hop_matches_bisection(sc5):
    d = last_hop_distance(PlanRequest(10.0, H, sc5))
    ref = bisect_sir_equals(10.0, lambda v: float(sir_rx_hop(sc5, v, H)), (0.0, sc5.D))
    assert d == pytest.approx(ref, rel=1e-9)


# --- middle hops ------------------------------------------------------------------

def test_middle_hop_matches_bisection(sc5):
    g = 10.0
    req = PlanRequest(g, H, sc5)
    s = first_hop_distance(req)
    rem = sc5.D - last_hop_distance(req) - s
    d = middle_hop_distance(req, s, rem)
    w = sc5.X - s
    phi = (H * H + sc5.Y ** 2 + w * w) / w
    ref = bisect_sir_equals(g, lambda v: float(sir_uav_hop(sc5, v, s + v, H)), (1e-9, min(phi, rem)))
    assert d == pytest.approx(ref, rel=1e-9)


def test_middle_hop_terminal_branch():
    # very strong UAV link: the hop root lies far beyond the remaining span
    sc = section5(power_uav_w=1e6)
    req = PlanRequest(1.0, H, sc)
    s, rem = 10.0, 50.0
    d_last = sc.D - s - rem
    assert middle_hop_distance(req, s, rem) == pytest.approx(sc.D - d_last - sc.min_uav_spacing_m)


def test_middle_hop_below_spacing_raises(sc5):
    g = feasibility_terms(sc5, H)["uav_hop"] * 0.999
    req = PlanRequest(g, H, sc5)
    # from x = 500 the MSI is closest, so even d_min fails
    with pytest.raises(InfeasibleGamma):
        middle_hop_distance(req, 500.0, 300.0)


# --- plans ------------------------------------------------------------------------

GAMMAS_DB = np.arange(-5.0, 11.5, 1.0)


@pytest.mark.parametrize("g_db", GAMMAS_DB)
def test_plan_valid_and_minimal(sc5, g_db):
    g = 10 ** (g_db / 10)
    req = PlanRequest(g, H, sc5)
    plan = plan_min_uavs(req)
    _check_plan(plan, sc5, g)
    if plan.n_uavs >= 2:
        with pytest.raises(InfeasibleGamma) as exc:
            plan_min_uavs(req, max_uavs=plan.n_uavs - 1)
        assert exc.value.term == "uav_count"
    assert plan_min_uavs(req, max_uavs=plan.n_uavs) == plan


def test_plan_staircase(sc5):
    counts = [plan_min_uavs(PlanRequest(10 ** (g / 10), H, sc5)).n_uavs for g in GAMMAS_DB]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_plan_power_trend(sc5):
    # p_u = 0.5 caps the Rx hop near 8 dB
    for g_db in (-4.0, 0.0, 4.0, 8.0):
        g = 10 ** (g_db / 10)
        counts = [plan_min_uavs(PlanRequest(g, H, sc5.with_(power_uav_w=p))).n_uavs
                  for p in (0.5, 1.0, 2.0)]
        assert counts == sorted(counts, reverse=True)


def test_plan_two_end_uavs():
    # d1 + d_last >= D with d1 < D
    sc = fig4()
    h = 10.0
    for g in np.geomspace(0.05, 50, 60):
        req = PlanRequest(float(g), h, sc)
        try:
            d1, dl = first_hop_distance(req), last_hop_distance(req)
            plan = plan_min_uavs(req)
        except InfeasibleGamma:
            continue
        if d1 < sc.D and d1 + dl >= sc.D:
            assert plan.n_uavs == 1 and plan.uav_x_m == (d1,)
            _check_plan(plan, sc, g)


@pytest.mark.parametrize("g_db", [0.0, 6.0, 10.0])
def test_prefix_dependence(sc5, g_db):
    g = 10 ** (g_db / 10)
    req = PlanRequest(g, H, sc5)
    plan = plan_min_uavs(req)
    x_n = sc5.D - last_hop_distance(req)
    xs = plan.uav_x_m
    assert xs[0] == first_hop_distance(req)
    # every greedy hop is recomputable from its stored prefix alone
    for k in range(1, len(xs) - 1):
        s = xs[k - 1]
        d = min(middle_hop_distance(req, s, x_n - s), x_n - sc5.min_uav_spacing_m - s)
        assert xs[k] - s == pytest.approx(d, rel=1e-12)


def test_plan_matches_dp(sc5):
    for g_db in (-3.0, 2.0, 7.0, 10.0):
        g = 10 ** (g_db / 10)
        n = plan_min_uavs(PlanRequest(g, H, sc5)).n_uavs
        assert n <= dp_min_uavs(sc5, g, H, 1.0) <= n + 1


# --- max gamma --------------------------------------------------------------------

@pytest.mark.parametrize("h", [10.0, 20.0, 40.0])
def test_max_gamma_one_uav_matches_single(h):
    sc = fig4()
    g, plan = max_gamma_for_n(sc, 1, h)
    ref = optimal_x_fixed_h(sc, h).sir.sir_system
    assert plan.n_uavs == 1
    assert g == pytest.approx(ref, rel=1e-5)


def test_max_gamma_many_uavs_reaches_bound(sc5):
    n = int(10 * sc5.D / sc5.min_uav_spacing_m)
    g, plan = max_gamma_for_n(sc5, n, H)
    assert g == pytest.approx(feasibility_bound(sc5, H), rel=1e-6)
    _check_plan(plan, sc5, g)


def test_max_gamma_n15(sc5):
    g, plan = max_gamma_for_n(sc5, 15, H)
    assert plan.n_uavs <= 15
    _check_plan(plan, sc5, g)
    with pytest.raises(InfeasibleGamma):
        plan_min_uavs(PlanRequest(g * (1 + 1e-5), H, sc5), max_uavs=15)
    assert dp_min_uavs(sc5, g, H, 1.0) in (plan.n_uavs, plan.n_uavs + 1)
