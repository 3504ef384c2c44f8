"""Real-root isolation for low-degree polynomials on a closed interval.

Critical points (roots of the derivative, found recursively) split the
interval into monotone pieces; each piece with a sign change is bisected.
Coefficients are ordered highest degree first, as in ``numpy.polyval``.
"""

from __future__ import annotations

from .errors import DegenerateLeadingCoefficient

# |p(x)| below this (normalized) counts as an exact zero, e.g. a tangency
ZERO_RESIDUAL = 1e-12


def horner(coeffs, x: float) -> float:
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def trim(coeffs, rel=1e-12) -> list[float]:
    coeffs = [float(c) for c in coeffs]
    scale = max((abs(c) for c in coeffs), default=0.0)
    if scale == 0.0:
        raise DegenerateLeadingCoefficient("polynomial is identically zero")
    i = 0
    while abs(coeffs[i]) < rel * scale:
        i += 1
    return coeffs[i:]


def derivative(coeffs) -> list[float]:
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def normalized_residual(coeffs, x: float) -> float:
    scale = max(abs(c) for c in coeffs)
    deg = len(coeffs) - 1
    return abs(horner(coeffs, x)) / (scale * max(1.0, abs(x)) ** deg)


def _bisect(coeffs, a: float, b: float, fa: float) -> float:
    # run to floating-point resolution; at most ~60 halvings on [0, 1]
    while True:
        m = 0.5 * (a + b)
        if m <= a or m >= b or b - a <= 1e-16:
            break
        fm = horner(coeffs, m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _isolate(coeffs, lo: float, hi: float) -> list[float]:
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    if deg == 1:
        r = -coeffs[1] / coeffs[0]
        return [r] if lo <= r <= hi else []

    crit = _isolate(trim(derivative(coeffs)), lo, hi)
    knots = [lo] + [c for c in crit if lo < c < hi] + [hi]
    found = []
    for k in knots:
        if normalized_residual(coeffs, k) <= ZERO_RESIDUAL:
            found.append(k)
    for a, b in zip(knots, knots[1:]):
        fa, fb = horner(coeffs, a), horner(coeffs, b)
        if fa == 0.0 or fb == 0.0:
            continue
        if (fa < 0) != (fb < 0):
            found.append(_bisect(coeffs, a, b, fa))
    return sorted(found)


def real_roots(coeffs, lo: float, hi: float, merge_tol: float = 0.0) -> list[float]:
    """All real roots of the polynomial in [lo, hi], ascending.

    Roots closer than ``merge_tol`` are collapsed to their mean (double roots
    show up as a tangency knot plus, sometimes, a bisection hit next to it).
    """
    coeffs = trim(coeffs)
    roots = _isolate(coeffs, lo, hi)
    merged: list[list[float]] = []
    for r in roots:
        if merged and r - merged[-1][-1] <= merge_tol:
            merged[-1].append(r)
        else:
            merged.append([r])
    return [sum(g) / len(g) for g in merged]
