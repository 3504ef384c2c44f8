"""Brute-force references and simple baselines.

Nothing here uses the closed forms: the grid search evaluates SIR_S on a
lattice, the inverter bisects, and the DP counts UAVs by breadth-first search
over a lattice of positions. They exist to check the analytic code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import Position, Scenario, sir_chain, sir_rx_hop, sir_single, sir_system, sir_tx_hop, sir_uav_hop
from .errors import ConfigError, Infeasible, NoBracket, RejectionOverflow
from .single import PlacementResult

RNG_ALGORITHM = "numpy.PCG64"
MAX_REJECTIONS = 10 ** 6


@dataclass(frozen=True)
class GridSpec:
    x_step_m: float
    h_step_m: float

    def __post_init__(self):
        if not (self.x_step_m > 0 and self.h_step_m > 0):
            raise ConfigError("grid steps must be positive")


@dataclass(frozen=True)
class BaselineReport:
    mean_sir: float
    best_sir: float
    trials: int
    rng_seed: int
    rng_algorithm: str = RNG_ALGORITHM


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    # both end points always included; actual spacing is <= step
    if hi <= lo:
        return np.array([lo])
    n = int(math.ceil((hi - lo) / step - 1e-9))
    return np.linspace(lo, hi, n + 1)


def grid_argmax_single(scenario: Scenario, grid: GridSpec) -> PlacementResult:
    """Best lattice point for one relay. Ties go to the smallest x, then h."""
    sc = scenario
    xs = _axis(0.0, sc.D, grid.x_step_m)
    hs = _axis(sc.h_min, sc.h_max, grid.h_step_m)
    vals = sir_system(sc, xs[:, None], hs[None, :])
    best = vals.max()
    # first index in row-major order = smallest x, then smallest h
    i = int(np.argmax(vals >= best * (1 - 1e-12)))
    ix, ih = divmod(i, hs.size)
    pos = Position(float(xs[ix]), float(hs[ih]))
    return PlacementResult(pos, sir_single(sc, pos), "grid")


def bisect_sir_equals(gamma: float, monotone_sir_fn: Callable[[float], float],
                      bracket: tuple[float, float], rel_tol: float = 1e-10) -> float:
    """d in ``bracket`` with fn(d) = gamma, for a monotone fn."""
    a, b = map(float, bracket)
    fa, fb = monotone_sir_fn(a) - gamma, monotone_sir_fn(b) - gamma
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa < 0) == (fb < 0):
        raise NoBracket(f"fn - gamma has the same sign at {a} and {b}")
    while True:
        m = 0.5 * (a + b)
        fm = monotone_sir_fn(m) - gamma
        if abs(fm) <= rel_tol * abs(gamma) or m <= a or m >= b:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m


def dp_min_uavs(scenario: Scenario, gamma: float, altitude_m: float, grid_step_m: float) -> int:
    """Fewest UAVs on a lattice of step ``grid_step_m`` meeting ``gamma`` on every hop."""
    sc, h = scenario, altitude_m
    if grid_step_m > sc.min_uav_spacing_m:
        raise ConfigError("grid_step_m must not exceed min_uav_spacing_m")
    g = gamma * (1 - 1e-9)
    xs = _axis(0.0, sc.D, grid_step_m)
    start = sir_tx_hop(sc, xs, h) >= g
    goal = sir_rx_hop(sc, sc.D - xs, h) >= g
    if (start & goal).any():
        return 1
    gap = xs[None, :] - xs[:, None]
    with np.errstate(divide="ignore"):
        hop_ok = sir_uav_hop(sc, gap, xs[None, :], h) >= g
    adj = (gap >= sc.min_uav_spacing_m * (1 - 1e-12)) & hop_ok
    frontier, seen, count = start, start.copy(), 1
    while frontier.any():
        reach = adj[frontier].any(axis=0)
        count += 1
        if (reach & goal).any():
            return count
        frontier = reach & ~seen
        seen |= reach
    raise Infeasible(f"no chain on a {grid_step_m} m lattice reaches target {gamma:.6g}")


def _chain_sir(sc: Scenario, xs, h) -> float:
    hops = [xs[0]] + [b - a for a, b in zip(xs, xs[1:])] + [sc.D - xs[-1]]
    return min(sir_chain(sc, hops, h))


def random_placement_baseline(scenario: Scenario, n_uavs: int, trials: int, rng_seed: int,
                              altitude_m: float | None = None) -> BaselineReport:
    """Mean and best SIR_S over uniformly random placements.

    One UAV: (x, h) uniform in the box, or x uniform at ``altitude_m``. Several
    UAVs: sorted uniform x positions redrawn until every gap is >= d_min, all at
    ``altitude_m`` (drawn uniformly per trial when not given).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n_uavs < 1:
        raise ValueError("n_uavs must be >= 1")
    sc = scenario
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    vals = []
    draws = 0
    for _ in range(trials):
        h = rng.uniform(sc.h_min, sc.h_max) if altitude_m is None else altitude_m
        if n_uavs == 1:
            x = rng.uniform(0.0, sc.D)
            vals.append(float(sir_system(sc, x, h)))
            continue
        while True:
            draws += 1
            if draws > MAX_REJECTIONS:
                raise RejectionOverflow("spacing constraint rejected too many draws")
            xs = np.sort(rng.uniform(0.0, sc.D, n_uavs))
            if np.all(np.diff(xs) >= sc.min_uav_spacing_m):
                break
        vals.append(_chain_sir(sc, xs.tolist(), h))
    return BaselineReport(math.fsum(vals) / len(vals), max(vals), trials, rng_seed)


def msi_blind_baseline(scenario: Scenario, altitude_m: float | None = None) -> PlacementResult:
    """Placement that balances the two hop path losses while ignoring the MSI:
    the midpoint, at h_min unless an altitude is given."""
    sc = scenario
    h = sc.h_min if altitude_m is None else altitude_m
    pos = Position(sc.D / 2.0, h)
    return PlacementResult(pos, sir_single(sc, pos), "msi-blind")


def msi_blind_chain(scenario: Scenario, n_uavs: int, altitude_m: float) -> tuple[tuple[float, ...], float]:
    """Equally spaced chain (equal hop path losses without the MSI) and its SIR_S."""
    sc = scenario
    xs = [sc.D * k / (n_uavs + 1) for k in range(1, n_uavs + 1)]
    return tuple(xs), _chain_sir(sc, xs, altitude_m)
