"""Optimal position of a single relay UAV.

Three settings: altitude fixed (search over x), horizontal position fixed
(search over h), or both free. Each result carries a label naming the case of
the closed-form case analysis that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .channel import Position, Scenario, SirPair, sir_hop1, sir_hop2, sir_single, sir_system
from .errors import AltitudeOutOfRange, HorizontalOutOfRange, InvalidPosition
from .locus import locus_argmax, locus_heights, quartic_roots_fixed_h, stationary_points

_REL = 1e-12

T1_CASES = tuple(f"T1-case{i}" for i in range(1, 6))
T2_CASES = tuple(f"T2-case{i}" for i in range(1, 4))
T3_CASES = ("T3-case1", "T3-case2-D-hmin", "T3-case2-0-hmin") + tuple(
    f"T3-case2-sub{i}" for i in range(1, 7))


@dataclass(frozen=True)
class PlacementResult:
    position: Position
    sir: SirPair
    case_label: str
    # positions the case analysis compared on the way (free placement only)
    candidates: tuple[Position, ...] = field(default=(), compare=False)


def _ge(a: float, b: float) -> bool:
    """a >= b, with near-equality counted as >=."""
    return a >= b - _REL * max(abs(a), abs(b))


def _result(sc: Scenario, x: float, h: float, label: str, candidates=()) -> PlacementResult:
    x = min(max(x, 0.0), sc.D)
    h = min(max(h, sc.h_min), sc.h_max)
    pos = Position(x, h)
    return PlacementResult(pos, sir_single(sc, pos), label, tuple(candidates))


def _s1(sc, x, h) -> float:
    return float(sir_hop1(sc, x, h))


def _s2(sc, x, h) -> float:
    return float(sir_hop2(sc, x, h))


def _ss(sc, x, h) -> float:
    return float(sir_system(sc, x, h))


def optimal_x_fixed_h(scenario: Scenario, h_hat_m: float) -> PlacementResult:
    sc, h, D = scenario, h_hat_m, scenario.D
    try:
        sc.check_altitude(h)
    except InvalidPosition as exc:
        raise AltitudeOutOfRange(str(exc)) from None

    if not _ge(_s1(sc, 0.0, h), _s2(sc, 0.0, h)):
        return _result(sc, 0.0, h, "T1-case1")

    psi_x = stationary_points(sc, h).psi_x_m
    if psi_x >= D:
        if not _ge(_s2(sc, D, h), _s1(sc, D, h)):
            return _result(sc, D, h, "T1-case3")
        roots = quartic_roots_fixed_h(sc, h)
        if roots:
            x_sol = max(roots, key=lambda x: (_ss(sc, x, h), -x))
        else:
            # the crossing sits on an end point and evaded the root isolator
            x_sol = max((0.0, D), key=lambda x: _ss(sc, x, h))
        return _result(sc, x_sol, h, "T1-case2")

    if _ge(_s2(sc, psi_x, h), _s1(sc, psi_x, h)):
        roots = quartic_roots_fixed_h(sc, h)
        if roots and _ge(_s1(sc, roots[0], h), _s1(sc, D, h)):
            return _result(sc, roots[0], h, "T1-case4")
        return _result(sc, D, h, "T1-case4")
    # case 5: whether or not the quartic has roots, x* = D
    return _result(sc, D, h, "T1-case5")


def optimal_h_fixed_x(scenario: Scenario, x_hat_m: float) -> PlacementResult:
    sc, x = scenario, x_hat_m
    try:
        sc.check_horizontal(x)
    except InvalidPosition as exc:
        raise HorizontalOutOfRange(str(exc)) from None
    x = min(max(x, 0.0), sc.D)

    psi_h = stationary_points(sc, sc.h_min).psi_h_m
    if not x > psi_h:
        return _result(sc, x, sc.h_min, "T2-case1")
    pts = locus_heights(sc, x)
    if pts:
        best = max(pts, key=lambda p: (_ss(sc, x, p.h_m), -p.h_m))
        return _result(sc, x, best.h_m, "T2-case2")
    h = max((sc.h_min, sc.h_max), key=lambda h: (_ss(sc, x, h), -h))
    return _result(sc, x, h, "T2-case3")


def optimal_position_free(scenario: Scenario, literal: bool = False) -> PlacementResult:
    """Best (x, h) over the whole box.

    The last four sub-cases choose between a point on the locus side and the
    fixed-x optimum at x = D. With ``literal`` they decide by comparing SIR_1
    at (D, h_max), which can pick x = D even though SIR_2 binds there and the
    locus point is better. By default they compare the SIR_S of the two
    candidates instead.
    """
    sc, D = scenario, scenario.D
    h_lo, h_hi = sc.h_min, sc.h_max
    corners = [(0.0, h_lo), (0.0, h_hi), (D, h_lo), (D, h_hi)]
    corner_pos = [Position(x, h) for x, h in corners]

    tilde = locus_argmax(sc)
    if tilde is None:
        x, h = max(corners, key=lambda c: (_ss(sc, *c), -c[0], -c[1]))
        return _result(sc, x, h, "T3-case1", corner_pos)

    cands = corner_pos + [Position(tilde.x_m, tilde.h_m)]

    def via_t2(x_hat, label):
        r = optimal_h_fixed_x(sc, x_hat)
        return _result(sc, r.position.x_m, r.position.h_m, label, cands + [r.position])

    # (D, h_min) attains the box-wide maximum of SIR_2 only when SIR_2 binds
    # there. With SIR_1(D, h_min) < SIR_2(D, h_min) <= SIR_1(D, h_max) it is
    # dominated by the locus, so that situation falls through to the sub-cases.
    if _ge(_s1(sc, D, h_lo), _s2(sc, D, h_lo)):
        return _result(sc, D, h_lo, "T3-case2-D-hmin", cands)
    if _ge(_s2(sc, 0.0, h_lo), _s1(sc, 0.0, h_lo)):
        return _result(sc, 0.0, h_lo, "T3-case2-0-hmin", cands)

    xt, ht = tilde.x_m, tilde.h_m
    sp = stationary_points(sc, ht)
    psi_x, psi_h = sp.psi_x_m, sp.psi_h_m
    if psi_x >= D:
        return via_t2(xt, "T3-case2-sub1")
    if xt >= psi_x:
        return via_t2(D, "T3-case2-sub2")
    if xt >= psi_h:
        near, labels = (xt, ht), ("T3-case2-sub3", "T3-case2-sub4")
    else:
        near, labels = (xt, h_lo), ("T3-case2-sub5", "T3-case2-sub6")
    at_d = optimal_h_fixed_x(sc, D)
    if literal:
        keep = _ge(_s1(sc, *near), _s1(sc, D, h_hi))
    else:
        keep = _ge(_ss(sc, *near), at_d.sir.sir_system)
    if keep:
        return _result(sc, *near, labels[0], cands + [Position(*near)])
    return _result(sc, D, at_d.position.h_m, labels[1], cands + [Position(*near), at_d.position])

