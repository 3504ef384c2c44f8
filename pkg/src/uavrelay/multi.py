"""Minimum-count multi-hop relay planning for a target system SIR.

UAVs share one altitude h and are indexed 1..N from the Tx. Hop d_1 runs from
the Tx to UAV_1, d_k from UAV_{k-1} to UAV_k, and d_{N+1} from UAV_N to the
Rx. The planner pushes UAV_1 as far from the Tx and UAV_N as far from the Rx
as the target allows, then fills the gap greedily from the Tx side with the
longest hop that still meets the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import Scenario, sir_chain, sir_tx_hop, sir_uav_hop
from .errors import InfeasibleGamma, InfeasibleGeometry, NegativeRadicand
from .locus import stationary_points

REL_TOL = 1e-9

MINUS = "minus"
PLUS = "plus"
TERMINAL = "terminal"


@dataclass(frozen=True)
class PlanRequest:
    gamma: float
    altitude_m: float
    scenario: Scenario

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        self.scenario.check_altitude(self.altitude_m)


@dataclass(frozen=True)
class MultiUavPlan:
    n_uavs: int
    hop_distances_m: tuple[float, ...]
    uav_x_m: tuple[float, ...]
    altitude_m: float
    sir_profile: tuple[float, ...]
    sir_system: float


def feasibility_terms(scenario: Scenario, altitude_m: float, unsquared_uav_term: bool = False) -> dict[str, float]:
    """Upper bounds on the target SIR from the Tx hop, an inter-UAV hop and the Rx hop.

    The inter-UAV ceiling uses the largest squared horizontal distance to the
    MSI, max(X^2, (D - X)^2). ``unsquared_uav_term`` swaps in the unsquared
    max(X, D - X) for comparison.
    """
    sc, h = scenario, altitude_m
    ch = sc.channel
    X, Y, D = sc.X, sc.Y, sc.D
    far = max(X, D - X) if unsquared_uav_term else max(X * X, (D - X) ** 2)
    return {
        "tx_hop": sc.power_tx_w * (X * X + Y * Y + h * h) / (sc.power_msi_w * h * h),
        "uav_hop": (sc.power_uav_w * ch.eta_nlos * (far + Y * Y + h * h)
                    / (sc.power_msi_w * ch.mu_los * sc.min_uav_spacing_m ** 2)),
        "rx_hop": (sc.power_uav_w * ch.mu_nlos * sc.rx_msi_sq
                   / (sc.power_msi_w * ch.eta_nlos * h * h)),
    }


def feasibility_bound(scenario: Scenario, altitude_m: float, unsquared_uav_term: bool = False) -> float:
    scenario.check_altitude(altitude_m)
    return min(feasibility_terms(scenario, altitude_m, unsquared_uav_term).values())


def _check_bound(req: PlanRequest) -> None:
    terms = feasibility_terms(req.scenario, req.altitude_m)
    name = min(terms, key=terms.get)
    if req.gamma > terms[name] * (1 + REL_TOL):
        raise InfeasibleGamma(
            f"target {req.gamma:.6g} exceeds the {name} ceiling {terms[name]:.6g}", term=name)


# --- end hops ------------------------------------------------------------------

def first_hop_roots(scenario: Scenario, gamma: float, h: float):
    """Both solutions of SIR_1(d) = gamma as (larger, smaller), or None if
    there is no real solution."""
    pt, pm = scenario.power_tx_w, scenario.power_msi_w
    X, Y = scenario.X, scenario.Y
    lead = pt - gamma * pm
    if abs(lead) <= 1e-12 * pt:
        # quadratic degenerates: -2 p_t X d + p_t (X^2 + Y^2) = 0
        if X == 0:
            return None
        r = (X * X + Y * Y) / (2.0 * X)
        return r, r
    disc = pt * pt * X * X - lead * (pt * (X * X + Y * Y) + h * h * lead)
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    r1, r2 = (pt * X + sq) / lead, (pt * X - sq) / lead
    return max(r1, r2), min(r1, r2)


def _first_hop(req: PlanRequest) -> tuple[float, str]:
    sc, g, h, D = req.scenario, req.gamma, req.altitude_m, req.scenario.D
    if sir_tx_hop(sc, 0.0, h) < g * (1 - REL_TOL):
        raise InfeasibleGamma("Tx hop cannot reach the target even above the Tx", term="tx_hop")
    roots = first_hop_roots(sc, g, h)
    if roots is None:
        # no crossing: SIR_1 stays above the target along the whole segment
        return D, TERMINAL
    d_plus, d_minus = roots
    if d_plus > D:
        # d_minus < 0 means the only positive crossing lies beyond the Rx
        if 0 <= d_minus <= D:
            return d_minus, MINUS
        return D, TERMINAL
    if d_plus < stationary_points(sc, h).psi_x_m:
        return d_plus, PLUS
    return D, TERMINAL


def first_hop_distance(request: PlanRequest) -> float:
    return _first_hop(request)[0]


def last_hop_distance(request: PlanRequest) -> float:
    sc, g, h = request.scenario, request.gamma, request.altitude_m
    ch = sc.channel
    rad = sc.power_uav_w * ch.mu_nlos * sc.rx_msi_sq / (g * sc.power_msi_w * ch.eta_nlos) - h * h
    if rad < -REL_TOL * h * h:
        raise NegativeRadicand(
            f"Rx hop cannot reach target {g:.6g} at altitude {h}", term="rx_hop")
    return math.sqrt(max(rad, 0.0))


# --- middle hops -----------------------------------------------------------------

def middle_hop_roots(scenario: Scenario, gamma: float, prefix_sum_m: float, h: float):
    """Solutions of SIR_k(d) = gamma for a hop starting at ``prefix_sum_m``,
    as (larger, smaller), or None when there is no real solution."""
    sc = scenario
    ch = sc.channel
    a = sc.power_uav_w / ch.mu_los
    b = gamma * sc.power_msi_w / ch.eta_nlos
    w = sc.X - prefix_sum_m
    q = w * w + sc.Y ** 2 + h * h
    lead = a - b
    if abs(lead) <= 1e-12 * a:
        if w <= 0:
            return None
        r = q / (2.0 * w)
        return r, r
    disc = a * a * w * w - a * lead * q
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    r1, r2 = (a * w + sq) / lead, (a * w - sq) / lead
    return max(r1, r2), min(r1, r2)


def _phi(sc: Scenario, s: float, h: float) -> float:
    # past the MSI the hop SIR only falls with distance; no stationary point
    w = sc.X - s
    if w <= 1e-12:
        return math.inf
    return (h * h + sc.Y ** 2 + w * w) / w


def _middle_hop(req: PlanRequest, prefix_sum_m: float, remaining_m: float) -> tuple[float, str]:
    sc, h = req.scenario, req.altitude_m
    d_last = sc.D - prefix_sum_m - remaining_m
    terminal = sc.D - d_last - sc.min_uav_spacing_m
    roots = middle_hop_roots(sc, req.gamma, prefix_sum_m, h)
    if roots is None or roots[0] <= 0:
        return terminal, TERMINAL
    d_plus, d_minus = roots
    if d_plus > remaining_m:
        if d_minus > 0:
            return d_minus, MINUS
        return terminal, TERMINAL
    if d_plus < _phi(sc, prefix_sum_m, h):
        return d_plus, PLUS
    return terminal, TERMINAL


def middle_hop_distance(request: PlanRequest, prefix_sum_m: float, remaining_m: float) -> float:
    """Longest hop d_k meeting the target from horizontal position ``prefix_sum_m``.

    ``remaining_m`` is the span still to cover up to UAV_N, i.e.
    D - prefix_sum - d_{N+1}.
    """
    d, _ = _middle_hop(request, prefix_sum_m, remaining_m)
    if d < request.scenario.min_uav_spacing_m * (1 - REL_TOL):
        raise InfeasibleGamma(
            f"no hop of at least d_min meets target {request.gamma:.6g} from x = {prefix_sum_m:.6g}",
            term="uav_hop")
    return d


# --- planning ---------------------------------------------------------------------

def _closing_position(req: PlanRequest, s: float, x_n: float) -> float | None:
    """Leftmost spot in [x_n, D] for the last UAV that a UAV at s can reach.

    Any spot right of x_n = D - d*_{N+1} serves the Rx hop. Seen from s, the
    feasible hop lengths are [d_min, r1] plus, when both roots are positive,
    [r2, inf); the leftmost reachable spot is therefore the lower end of the
    window or s + r2.
    """
    sc, g, h = req.scenario, req.gamma, req.altitude_m
    g_ok = g * (1 - REL_TOL)
    lo = max(x_n, s + sc.min_uav_spacing_m)
    if lo > sc.D:
        return None
    if sir_uav_hop(sc, lo - s, lo, h) >= g_ok:
        return lo
    roots = middle_hop_roots(sc, g, s, h)
    if roots is not None and roots[1] > 0:
        x2 = s + roots[0]
        if lo < x2 <= sc.D and sir_uav_hop(sc, x2 - s, x2, h) >= g_ok:
            return x2
    return None


def _make_plan(sc: Scenario, xs: list[float], h: float) -> MultiUavPlan:
    hops = [xs[0]] + [b - a for a, b in zip(xs, xs[1:])] + [sc.D - xs[-1]]
    sirs = sir_chain(sc, hops, h)
    return MultiUavPlan(len(xs), tuple(hops), tuple(xs), h, tuple(sirs), min(sirs))


def plan_min_uavs(request: PlanRequest, max_uavs: int | None = None) -> MultiUavPlan:
    """Fewest UAVs (and their positions) so that every hop SIR meets the target.

    With ``max_uavs`` set, raises InfeasibleGamma(term="uav_count") when the
    chain cannot be closed with that many UAVs.
    """
    req = request
    sc, g, h, D = req.scenario, req.gamma, req.altitude_m, req.scenario.D
    d_min = sc.min_uav_spacing_m
    g_ok = g * (1 - REL_TOL)
    _check_bound(req)

    def over(n):
        if max_uavs is not None and n > max_uavs:
            raise InfeasibleGamma(f"more than {max_uavs} UAVs needed", term="uav_count")

    d1, _ = _first_hop(req)
    if d1 >= D:
        return _make_plan(sc, [D], h)
    d_last = last_hop_distance(req)
    if d1 + d_last >= D:
        # one UAV at d1 already sees the Rx within reach
        return _make_plan(sc, [d1], h)

    xs = [d1]
    x_n = D - d_last
    while True:
        s = xs[-1]
        over(len(xs) + 1)
        x_close = _closing_position(req, s, x_n)
        if x_close is not None:
            xs.append(x_close)
            break
        d, _ = _middle_hop(req, s, x_n - s)
        p = min(s + d, x_n - d_min)
        if p - s < d_min * (1 - REL_TOL) or sir_uav_hop(sc, p - s, p, h) < g_ok:
            raise InfeasibleGamma(
                f"no hop of at least d_min meets target {g:.6g} from x = {s:.6g}", term="uav_hop")
        xs.append(p)
    return _make_plan(sc, xs, h)


def max_gamma_for_n(scenario: Scenario, n_uavs: int, altitude_m: float, rel_tol: float = 1e-6):
    """Largest target SIR that ``n_uavs`` UAVs at ``altitude_m`` can guarantee.

    Bisection (geometric) over (0, feasibility_bound]. Returns (gamma, plan).
    """
    if n_uavs < 1:
        raise ValueError("n_uavs must be >= 1")
    sc, h = scenario, altitude_m

    def attempt(g):
        try:
            return plan_min_uavs(PlanRequest(g, h, sc), max_uavs=n_uavs)
        except InfeasibleGamma:
            return None

    hi = feasibility_bound(sc, h)
    plan = attempt(hi)
    if plan is not None:
        return hi, plan
    lo = hi
    while True:
        lo *= 0.5
        plan = attempt(lo)
        if plan is not None:
            break
        if lo < 1e-12 * hi:
            raise InfeasibleGeometry(f"{n_uavs} UAVs cannot form any valid chain")
    while hi - lo > rel_tol * 0.1 * lo:
        mid = math.sqrt(lo * hi)
        cand = attempt(mid)
        if cand is None:
            hi = mid
        else:
            lo, plan = mid, cand
    return lo, plan
