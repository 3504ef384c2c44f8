"""Equal-SIR locus of a single relay and the stationary points of the hop SIRs.

With u = h^2, SIR_1 = SIR_2 reduces to  A u^2 + B(x) u + C(x) = 0  where
A = p_t and B, C are polynomials in x. For a fixed altitude the same relation
is a quartic in x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .channel import Scenario, sir_hop2, sir_system
from .errors import SingularPrefix
from .roots import normalized_residual, real_roots

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class LocusCoefficients:
    a: float
    b: float
    c: float
    x_m: float


@dataclass(frozen=True)
class LocusPoint:
    x_m: float
    h_m: float
    branch: str


@dataclass(frozen=True)
class StationaryPoints:
    psi_x_m: float
    psi_h_m: float
    valid: bool


@dataclass(frozen=True)
class MidHopStationary:
    phi_d_m: float
    prefix_sum_m: float


def _bc_polys(sc: Scenario) -> tuple[Polynomial, Polynomial]:
    """B(x) and C(x) as polynomials in x."""
    pt = sc.power_tx_w
    w = sc.power_uav_w * sc.channel.nlos_ratio
    K = sc.rx_msi_sq
    X, Y, D = sc.X, sc.Y, sc.D
    msi = Polynomial([X * X + Y * Y, -2.0 * X, 1.0])   # (x - X)^2 + Y^2
    rx = Polynomial([D * D, -2.0 * D, 1.0])            # (D - x)^2
    B = pt * msi + pt * rx - w * K
    C = pt * msi * rx - w * K * Polynomial([0.0, 0.0, 1.0])
    return B, C


def locus_coefficients(scenario: Scenario, x_m: float) -> LocusCoefficients:
    scenario.check_horizontal(x_m)
    B, C = _bc_polys(scenario)
    return LocusCoefficients(scenario.power_tx_w, float(B(x_m)), float(C(x_m)), x_m)


def quartic_poly(sc: Scenario, h: float) -> Polynomial:
    """A h^4 + B(x) h^2 + C(x) as a polynomial in x."""
    B, C = _bc_polys(sc)
    u = h * h
    return sc.power_tx_w * u * u + B * u + C


def quartic_display_poly(sc: Scenario, h: float) -> Polynomial:
    """The fixed-altitude quartic written term by term; must equal quartic_poly."""
    pt = sc.power_tx_w
    w = sc.power_uav_w * sc.channel.nlos_ratio
    K = sc.rx_msi_sq
    X, Y, D = sc.X, sc.Y, sc.D
    u = h * h
    x = Polynomial([0.0, 1.0])
    return (pt * (x - X) ** 2 * ((D - x) ** 2 + u)
            + pt * (Y * Y + u) * (D - x) ** 2
            - w * x ** 2 * K
            + pt * u * (Y * Y + u)
            - w * u * K)


def discriminant_poly(sc: Scenario) -> Polynomial:
    """B(x)^2 - 4 A C(x); the two locus branches merge where it vanishes."""
    B, C = _bc_polys(sc)
    return B * B - 4.0 * sc.power_tx_w * C


def _stable_quadratic(a, b, c):
    """Both roots of a u^2 + b u + c (a > 0), larger first; nan when complex."""
    disc = b * b - 4.0 * a * c
    sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
    q = -0.5 * (b + np.copysign(sq, b))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a
        r2 = np.where(q != 0, c / q, 0.0)
    return np.maximum(r1, r2), np.minimum(r1, r2)


def locus_lambda(sc: Scenario, xs):
    """Lambda^+(x), Lambda^-(x) for an array of x; nan where the discriminant is negative."""
    B, C = _bc_polys(sc)
    xs = np.asarray(xs, dtype=float)
    return _stable_quadratic(sc.power_tx_w, B(xs), C(xs))


def _polish_u(sc: Scenario, x: float, u: float) -> float:
    """Newton on the factored equal-SIR relation; the expanded B, C lose digits."""
    pt = sc.power_tx_w
    w = sc.power_uav_w * sc.channel.nlos_ratio * sc.rx_msi_sq
    a = (x - sc.X) ** 2 + sc.Y ** 2
    b = (sc.D - x) ** 2
    for _ in range(3):
        f = pt * (a + u) * (b + u) - w * (x * x + u)
        fp = pt * (a + b + 2.0 * u) - w
        if fp == 0.0 or not math.isfinite(f):
            break
        step = f / fp
        if not abs(step) < 1e-3 * max(u, 1.0):
            break
        u -= step
        if step == 0.0:
            break
    return u


def locus_heights(scenario: Scenario, x_m: float) -> list[LocusPoint]:
    """Feasible points of the locus above x (0, 1 or 2 of them)."""
    scenario.check_horizontal(x_m)
    lam_p, lam_m = locus_lambda(scenario, x_m)
    lam_p, lam_m = float(lam_p), float(lam_m)
    if math.isnan(lam_p):
        return []
    out = []
    branches = [(PLUS, lam_p)] if lam_p == lam_m else [(PLUS, lam_p), (MINUS, lam_m)]
    for branch, lam in branches:
        if lam < 0:
            continue
        lam = _polish_u(scenario, x_m, lam)
        h = math.sqrt(max(lam, 0.0))
        if scenario.h_min <= h <= scenario.h_max:
            out.append(LocusPoint(x_m, h, branch))
    return out


def quartic_roots_fixed_h(scenario: Scenario, h_hat_m: float) -> list[float]:
    """Horizontal positions in [0, D] where SIR_1 = SIR_2 at altitude h_hat."""
    scenario.check_altitude(h_hat_m)
    D = scenario.D
    # solve in t = x / D so the coefficients stay comparable in size
    p = quartic_poly(scenario, h_hat_m)(Polynomial([0.0, D]))
    coeffs = p.coef[::-1]
    ts = real_roots(coeffs, 0.0, 1.0, merge_tol=1e-9)
    return [min(max(t * D, 0.0), D) for t in ts]


def quartic_residual(scenario: Scenario, h_hat_m: float, x: float) -> float:
    """|P(x)| / (max|coeff| * max(1, |x|)^4) in the original x variable."""
    return normalized_residual(quartic_poly(scenario, h_hat_m).coef[::-1], x)


def stationary_points(scenario: Scenario, h_m: float) -> StationaryPoints:
    X, Y = scenario.X, scenario.Y
    if X == 0:
        return StationaryPoints(math.inf, math.inf, False)
    r2 = X * X + Y * Y
    psi_x = (r2 + math.sqrt(r2 * r2 + 4.0 * X * X * h_m * h_m)) / (2.0 * X)
    psi_h = r2 / (2.0 * X)
    return StationaryPoints(psi_x, psi_h, True)


def mid_hop_stationary(scenario: Scenario, prefix_sum_m: float, h_m: float) -> MidHopStationary:
    scenario.check_horizontal(prefix_sum_m)
    w = scenario.X - prefix_sum_m
    if abs(w) < 1e-12:
        raise SingularPrefix(f"prefix sum {prefix_sum_m} sits under the MSI")
    return MidHopStationary((h_m * h_m + scenario.Y ** 2 + w * w) / w, prefix_sum_m)


# --- maximizing SIR_S along the locus -------------------------------------------

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: float, b: float, tol: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _branch_of(sc: Scenario, x: float, h: float) -> str:
    lp, lm = locus_lambda(sc, x)
    u = h * h
    return PLUS if abs(float(lp) - u) <= abs(float(lm) - u) else MINUS


def _branch_height(sc: Scenario, x: float, branch: str) -> float:
    lp, lm = locus_lambda(sc, x)
    lam = float(lp if branch == PLUS else lm)
    if not lam >= 0:
        return math.nan
    return math.sqrt(_polish_u(sc, x, lam))


def locus_points(scenario: Scenario, step_frac: float = 1e-3) -> list[LocusPoint]:
    """Finite set of feasible locus points that contains the SIR_S maximizer.

    Dense sampling along x (step ``step_frac * D``) picks out local maxima on
    each branch, which are then refined by golden-section search. Points where
    the locus leaves the box (h = h_min, h = h_max, x = 0, x = D) and where the
    two branches merge are added exactly, since the maximum can sit there.
    """
    sc = scenario
    D = sc.D
    n = int(round(1.0 / step_frac)) + 1
    xs = np.linspace(0.0, D, n)
    lp, lm = locus_lambda(sc, xs)
    pts: list[LocusPoint] = []

    for branch, lam in ((PLUS, lp), (MINUS, lm)):
        with np.errstate(invalid="ignore"):
            hs = np.sqrt(np.where(lam >= 0, lam, np.nan))
            ok = (hs >= sc.h_min) & (hs <= sc.h_max)
        vals = np.where(ok, sir_hop2(sc, xs, np.nan_to_num(hs, nan=sc.h_min)), -np.inf)
        left = np.concatenate(([-np.inf], vals[:-1]))
        right = np.concatenate((vals[1:], [-np.inf]))
        peaks = np.nonzero(ok & (vals >= left) & (vals >= right))[0]

        def g(x, branch=branch):
            h = _branch_height(sc, x, branch)
            if math.isnan(h):
                return -math.inf
            return float(sir_hop2(sc, x, h))

        for i in peaks:
            pts.append(LocusPoint(float(xs[i]), float(hs[i]), branch))
            a, b = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
            xr = _golden_max(g, float(a), float(b), 1e-9 * D)
            hr = _branch_height(sc, xr, branch)
            if not math.isnan(hr) and sc.h_min <= hr <= sc.h_max:
                pts.append(LocusPoint(xr, hr, branch))

    for h in (sc.h_min, sc.h_max):
        for x in quartic_roots_fixed_h(sc, h):
            pts.append(LocusPoint(x, h, _branch_of(sc, x, h)))
    for x in (0.0, D):
        pts.extend(locus_heights(sc, x))

    B, _ = _bc_polys(sc)
    disc = discriminant_poly(sc)(Polynomial([0.0, D]))
    for t in real_roots(disc.coef[::-1], 0.0, 1.0, merge_tol=1e-12):
        x = t * D
        u = -float(B(x)) / (2.0 * sc.power_tx_w)
        if u > 0:
            h = math.sqrt(_polish_u(sc, x, u))
            if sc.h_min <= h <= sc.h_max:
                pts.append(LocusPoint(x, h, PLUS))
    return pts


def locus_argmax(scenario: Scenario) -> LocusPoint | None:
    """The feasible locus point with the largest SIR_S, or None if the locus
    misses the box. Ties go to the smallest x, then the smallest h."""
    pts = locus_points(scenario)
    if not pts:
        return None
    vals = [float(sir_system(scenario, p.x_m, p.h_m)) for p in pts]
    best = max(vals)
    tied = [p for p, v in zip(pts, vals) if v >= best * (1 - 1e-12)]
    return min(tied, key=lambda p: (p.x_m, p.h_m))
