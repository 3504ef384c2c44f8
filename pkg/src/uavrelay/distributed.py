"""Deterministic simulation of the distributed placement protocol.

Each round: fix the target from the two end offsets, anchor one end and
re-derive the other, place UAV_N..UAV_{m+1} by backward propagation from the
Rx side and UAV_2..UAV_m by forward propagation from the Tx side (m = N // 2),
then probe the single remaining hop m -> m+1. If the probe falls short, both
end offsets grow by the step and the round repeats.

Agents only talk to their index neighbours; messages travel through an
in-process FIFO queue and are all kept in the trace.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .channel import Scenario, sir_chain, sir_rx_hop, sir_tx_hop, sir_uav_hop
from .errors import ConfigError, InfeasibleGamma
from .multi import PlanRequest, _first_hop, _middle_hop, last_hop_distance

CONVERGED = "Converged"
ITERATION_CAP = "IterationCapReached"
CHAINS_CROSSED = "ChainsCrossed"

REL_TOL = 1e-9


@dataclass(frozen=True)
class DistributedConfig:
    n_uavs: int
    step_m: float
    altitude_m: float
    scenario: Scenario
    max_iterations: int | None = None

    def __post_init__(self):
        if self.n_uavs < 2:
            raise ConfigError("the protocol needs at least two UAVs")
        if not self.step_m > 0:
            raise ConfigError("step_m must be positive")
        self.scenario.check_altitude(self.altitude_m)
        if self.max_iterations is None:
            object.__setattr__(self, "max_iterations",
                               int(math.ceil(10 * self.scenario.D / self.step_m)))
        elif self.max_iterations < 1:
            raise ConfigError("max_iterations must be positive")


@dataclass(frozen=True)
class Message:
    iteration: int
    sender: int
    receiver: int
    kind: str        # "position" or "probe"
    x_m: float


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    d1_m: float
    d_last_m: float
    gamma: float
    positions_x_m: tuple[float, ...]
    middle_sir: float
    messages: int
    anchored: str            # "tx" or "rx"
    first_hop_branch: str    # selection branch when d_1 was re-derived, else ""
    compacted: bool = False


@dataclass(frozen=True)
class DistributedTrace:
    records: tuple[IterationRecord, ...]
    outcome: str
    final_sir_system: float
    message_log: tuple[Message, ...] = field(default=(), repr=False)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_positions_x_m(self) -> tuple[float, ...]:
        return self.records[-1].positions_x_m if self.records else ()


def backward_hop(scenario: Scenario, gamma: float, suffix_sum_m: float, altitude_m: float) -> float:
    """Hop d_k that gives SIR_k = gamma at a UAV sitting ``suffix_sum_m`` before the Rx."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    sc, h = scenario, altitude_m
    ch = sc.channel
    num = (sc.X - sc.D + suffix_sum_m) ** 2 + sc.Y ** 2 + h * h
    return math.sqrt(num / (gamma * sc.power_msi_w * ch.mu_los / (sc.power_uav_w * ch.eta_nlos)))


class _Bus:
    """FIFO of neighbour-to-neighbour messages."""

    def __init__(self, n: int):
        self.n = n
        self.queue: deque[Message] = deque()
        self.log: list[Message] = []

    def send(self, msg: Message) -> None:
        if abs(msg.sender - msg.receiver) != 1 or not (1 <= msg.receiver <= self.n):
            raise RuntimeError(f"illegal message {msg.sender} -> {msg.receiver}")
        self.queue.append(msg)
        self.log.append(msg)


class _Round:
    """One pass of both propagations for a fixed target and end offsets."""

    def __init__(self, cfg: DistributedConfig, bus: _Bus, iteration: int,
                 gamma: float, d1: float, d_last: float, compact: bool):
        self.cfg, self.bus, self.i = cfg, bus, iteration
        self.gamma, self.d1, self.d_last = gamma, d1, d_last
        self.compact = compact
        self.n = cfg.n_uavs
        self.m = self.n // 2
        self.x: dict[int, float] = {}
        self.probe_sir = math.nan
        self.req = PlanRequest(gamma, cfg.altitude_m, cfg.scenario)

    def run(self) -> None:
        sc, n, m = self.cfg.scenario, self.n, self.m
        self.x[1] = self.d1
        self.x[n] = sc.D - self.d_last
        # both propagations start together; the queue interleaves them
        if n - 1 >= m + 1:
            self._emit(n, n - 1, "position")
        if m >= 2:
            self._emit(1, 2, "position")
        if m == 1:
            self._emit(1, 2, "probe")
        while self.bus.queue:
            self._deliver(self.bus.queue.popleft())

    def _emit(self, sender: int, receiver: int, kind: str) -> None:
        self.bus.send(Message(self.i, sender, receiver, kind, self.x[sender]))

    def _deliver(self, msg: Message) -> None:
        k, m = msg.receiver, self.m
        if msg.kind == "probe":
            self.probe_sir = self._hop_sir(msg.x_m, self.x[k])
            return
        if msg.sender > k:
            self.x[k] = msg.x_m - self._backward(msg.x_m, k + 1)
            if k - 1 >= m + 1:
                self._emit(k, k - 1, "position")
        else:
            self.x[k] = msg.x_m + self._forward(msg.x_m, k)
            if k + 1 <= m:
                self._emit(k, k + 1, "position")
            else:
                self._emit(k, k + 1, "probe")

    def _hop_sir(self, x_tx: float, x_rx: float) -> float:
        d = x_rx - x_tx
        if d <= 0:
            return -math.inf
        return float(sir_uav_hop(self.cfg.scenario, d, x_rx, self.cfg.altitude_m))

    def _backward(self, x_rx: float, k: int) -> float:
        sc = self.cfg.scenario
        d = backward_hop(sc, self.gamma, sc.D - x_rx, self.cfg.altitude_m)
        if self.compact:
            # never claim more than an equal share of what is left towards UAV_1
            d = min(d, (x_rx - self.d1) / (k - 1))
        return d

    def _forward(self, s: float, k: int) -> float:
        sc = self.cfg.scenario
        x_n = sc.D - self.d_last
        d, _ = _middle_hop(self.req, s, x_n - s)
        d = min(d, x_n - sc.min_uav_spacing_m - s)
        if self.compact:
            d = min(d, (x_n - s) / (self.n - k + 1))
        return d

    def positions(self) -> tuple[float, ...]:
        return tuple(self.x[k] for k in range(1, self.n + 1))

    def crossed(self) -> bool:
        xs = self.positions()
        d_min = self.cfg.scenario.min_uav_spacing_m * (1 - REL_TOL)
        return any(b - a < d_min for a, b in zip(xs, xs[1:]))


def _end_sirs(cfg: DistributedConfig, d1: float, d_last: float) -> tuple[float, float]:
    sc, h = cfg.scenario, cfg.altitude_m
    return float(sir_tx_hop(sc, d1, h)), float(sir_rx_hop(sc, d_last, h))


def _chain_min(cfg: DistributedConfig, xs) -> float:
    sc = cfg.scenario
    hops = [xs[0]] + [b - a for a, b in zip(xs, xs[1:])] + [sc.D - xs[-1]]
    try:
        return min(sir_chain(sc, hops, cfg.altitude_m))
    except (ValueError, ArithmeticError):
        return math.nan


def run_distributed(config: DistributedConfig) -> DistributedTrace:
    cfg = config
    sc, h = cfg.scenario, cfg.altitude_m
    bus = _Bus(cfg.n_uavs)
    records: list[IterationRecord] = []
    d1, d_last = 0.0, 0.0

    for i in range(cfg.max_iterations):
        s1, s_last = _end_sirs(cfg, d1, d_last)
        gamma = min(s1, s_last)
        branch = ""
        try:
            if gamma == s1:
                anchored = "tx"
                d_last = last_hop_distance(PlanRequest(gamma, h, sc))
            else:
                anchored = "rx"
                d1, branch = _first_hop(PlanRequest(gamma, h, sc))
        except InfeasibleGamma:
            return DistributedTrace(tuple(records), CHAINS_CROSSED, math.nan, tuple(bus.log))

        sent = len(bus.log)
        rnd = _Round(cfg, bus, i, gamma, d1, d_last, compact=False)
        rnd.run()
        compacted = False
        if rnd.crossed():
            # more UAVs than this target needs: rerun with every hop capped at
            # an equal share of the span still open
            rnd = _Round(cfg, bus, i, gamma, d1, d_last, compact=True)
            rnd.run()
            compacted = True
        xs = rnd.positions()
        rec = IterationRecord(i, d1, d_last, gamma, xs, rnd.probe_sir, len(bus.log) - sent,
                              anchored, branch, compacted)
        records.append(rec)

        if rnd.crossed():
            return DistributedTrace(tuple(records), CHAINS_CROSSED, math.nan, tuple(bus.log))
        if rnd.probe_sir >= gamma * (1 - REL_TOL):
            return DistributedTrace(tuple(records), CONVERGED, _chain_min(cfg, xs), tuple(bus.log))
        d1 += cfg.step_m
        d_last += cfg.step_m

    last = records[-1].positions_x_m if records else ()
    final = _chain_min(cfg, last) if last else math.nan
    return DistributedTrace(tuple(records), ITERATION_CAP, final, tuple(bus.log))
