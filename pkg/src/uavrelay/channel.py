"""Path loss and SIR expressions for a Tx -> UAV relay(s) -> Rx link with one
dominant ground interferer (the MSI).

Geometry: Tx at (0, 0, 0), Rx at (D, 0, 0), MSI at (X_MSI, Y_MSI, 0). UAVs fly
in the y = 0 plane at altitude h. Every SIR here is a linear ratio; dB only
shows up at the reporting layer.

The hop-level functions accept numpy arrays as well as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    CoverageMismatch,
    EmptyChain,
    InvalidPosition,
    NonPositiveDistance,
    SpacingViolation,
)

SPEED_OF_LIGHT = 299792458.0

LOS = "LoS"
NLOS = "NLoS"
AIR_GROUND = "AirGround"

# positions produced by root refinement may sit a few ulps outside the box
_BOX_TOL = 1e-9


@dataclass(frozen=True)
class ChannelParams:
    carrier_frequency_hz: float = 2e9
    excess_loss_los: float = 10 ** 0.01
    excess_loss_nlos: float = 10 ** 2.1
    path_loss_exponent: float = 2.0
    speed_of_light: float = SPEED_OF_LIGHT
    # None -> eta_nlos = mu_nlos, the configuration used for every figure
    eta_nlos: float | None = None
    mu_los: float = field(init=False)
    mu_nlos: float = field(init=False)

    def __post_init__(self):
        if self.carrier_frequency_hz <= 0:
            raise ConfigError("carrier_frequency_hz must be positive")
        if self.excess_loss_los <= 0 or self.excess_loss_nlos <= 0:
            raise ConfigError("excess loss factors must be positive")
        if self.excess_loss_los > self.excess_loss_nlos:
            raise ConfigError("excess_loss_los must not exceed excess_loss_nlos")
        if self.path_loss_exponent != 2:
            # the closed forms (locus quartic, hop roots) only hold for alpha = 2
            raise ConfigError("only path_loss_exponent = 2 is supported")
        if self.speed_of_light <= 0:
            raise ConfigError("speed_of_light must be positive")
        base = (4.0 * math.pi * self.carrier_frequency_hz / self.speed_of_light) ** self.path_loss_exponent
        object.__setattr__(self, "mu_los", self.excess_loss_los * base)
        object.__setattr__(self, "mu_nlos", self.excess_loss_nlos * base)
        if self.eta_nlos is None:
            object.__setattr__(self, "eta_nlos", self.mu_nlos)
        elif self.eta_nlos <= 0:
            raise ConfigError("eta_nlos must be positive")

    @property
    def nlos_ratio(self) -> float:
        """mu_NLoS / eta_NLoS, the weight on the Rx hop in the locus equations."""
        return self.mu_nlos / self.eta_nlos


@dataclass(frozen=True)
class Scenario:
    distance_tx_rx_m: float
    msi_x_m: float
    msi_y_m: float
    power_tx_w: float
    power_uav_w: float
    power_msi_w: float
    altitude_min_m: float
    altitude_max_m: float
    min_uav_spacing_m: float = 1.0
    channel: ChannelParams = field(default_factory=ChannelParams)

    def __post_init__(self):
        D = self.distance_tx_rx_m
        if not D > 0:
            raise ConfigError("distance_tx_rx_m must be positive")
        if not 0 <= self.msi_x_m <= D:
            raise ConfigError("msi_x_m must lie in [0, distance_tx_rx_m]")
        if self.msi_y_m < 0:
            raise ConfigError("msi_y_m must be nonnegative")
        for name in ("power_tx_w", "power_uav_w", "power_msi_w"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.altitude_min_m <= self.altitude_max_m:
            raise ConfigError("need 0 < altitude_min_m <= altitude_max_m")
        if not self.min_uav_spacing_m > 0:
            raise ConfigError("min_uav_spacing_m must be positive")

    # short aliases used throughout the formulas
    @property
    def D(self) -> float:
        return self.distance_tx_rx_m

    @property
    def X(self) -> float:
        return self.msi_x_m

    @property
    def Y(self) -> float:
        return self.msi_y_m

    @property
    def h_min(self) -> float:
        return self.altitude_min_m

    @property
    def h_max(self) -> float:
        return self.altitude_max_m

    @property
    def rx_msi_sq(self) -> float:
        """Squared ground distance between the Rx and the MSI."""
        return self.Y ** 2 + (self.D - self.X) ** 2

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def check_altitude(self, h: float) -> None:
        tol = _BOX_TOL * self.h_max
        if not self.h_min - tol <= h <= self.h_max + tol:
            raise InvalidPosition(f"altitude {h} outside [{self.h_min}, {self.h_max}]")

    def check_horizontal(self, x: float) -> None:
        tol = _BOX_TOL * self.D
        if not -tol <= x <= self.D + tol:
            raise InvalidPosition(f"x = {x} outside [0, {self.D}]")


@dataclass(frozen=True)
class Position:
    x_m: float
    h_m: float


@dataclass(frozen=True)
class SirPair:
    sir_hop1: float
    sir_hop2: float
    sir_system: float


def path_loss(kind: str, distance_m: float, params: ChannelParams) -> float:
    if distance_m <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance_m}")
    coeff = {LOS: params.mu_los, NLOS: params.mu_nlos, AIR_GROUND: params.eta_nlos}
    try:
        return coeff[kind] * distance_m ** params.path_loss_exponent
    except KeyError:
        raise ValueError(f"unknown link kind {kind!r}") from None


# --- single relay -----------------------------------------------------------

def sir_hop1(sc: Scenario, x, h):
    """SIR at a UAV at (x, h): Tx signal over MSI interference, both air-ground."""
    return sc.power_tx_w * ((x - sc.X) ** 2 + sc.Y ** 2 + h ** 2) / (sc.power_msi_w * (x ** 2 + h ** 2))


def sir_hop2(sc: Scenario, x, h):
    """SIR at the Rx when relayed by a UAV at (x, h)."""
    ch = sc.channel
    return (sc.power_uav_w * sc.rx_msi_sq
            / (sc.power_msi_w * ((sc.D - x) ** 2 + h ** 2) * (ch.eta_nlos / ch.mu_nlos)))


def sir_system(sc: Scenario, x, h):
    return np.minimum(sir_hop1(sc, x, h), sir_hop2(sc, x, h))


def sir_single(scenario: Scenario, pos: Position) -> SirPair:
    scenario.check_horizontal(pos.x_m)
    scenario.check_altitude(pos.h_m)
    s1 = float(sir_hop1(scenario, pos.x_m, pos.h_m))
    s2 = float(sir_hop2(scenario, pos.x_m, pos.h_m))
    return SirPair(s1, s2, min(s1, s2))


# --- multi-hop chain ----------------------------------------------------------

def sir_tx_hop(sc: Scenario, d1, h):
    """SIR at UAV_1 sitting d1 metres (horizontally) from the Tx."""
    return sir_hop1(sc, d1, h)


def sir_uav_hop(sc: Scenario, d, x_rx, h):
    """SIR at a UAV at horizontal position x_rx receiving from a UAV d metres behind.

    Air-to-air LoS signal against air-ground MSI interference.
    """
    ch = sc.channel
    return (sc.power_uav_w * ch.eta_nlos * ((sc.X - x_rx) ** 2 + sc.Y ** 2 + h ** 2)
            / (sc.power_msi_w * ch.mu_los * d ** 2))


def sir_rx_hop(sc: Scenario, d_last, h):
    """SIR at the Rx when the last UAV is d_last metres before it."""
    ch = sc.channel
    return (sc.power_uav_w * ch.mu_nlos * sc.rx_msi_sq
            / (sc.power_msi_w * ch.eta_nlos * (d_last ** 2 + h ** 2)))


def sir_chain(scenario: Scenario, hop_distances: Sequence[float], altitude_m: float) -> list[float]:
    """Per-hop SIRs SIR_1..SIR_{N+1} for a chain of N UAVs at a common altitude.

    ``hop_distances`` holds d_1..d_{N+1}. The end hops may be zero (a UAV
    directly above the Tx or Rx); hops between UAVs must respect the minimum
    spacing.
    """
    d = [float(v) for v in hop_distances]
    if len(d) < 2:
        raise ValueError("a chain needs at least one UAV (two hops)")
    scenario.check_altitude(altitude_m)
    D = scenario.D
    if d[0] < 0 or d[-1] < 0:
        raise NonPositiveDistance("end hops must be nonnegative")
    if abs(math.fsum(d) - D) > 1e-9 * D:
        raise CoverageMismatch(f"hops sum to {math.fsum(d)}, expected {D}")
    d_min = scenario.min_uav_spacing_m
    for k, dk in enumerate(d[1:-1], start=2):
        if dk < d_min * (1 - 1e-9):
            raise SpacingViolation(f"hop d_{k} = {dk} is below d_min = {d_min}")

    h = altitude_m
    sirs = [float(sir_tx_hop(scenario, d[0], h))]
    x = d[0]
    for dk in d[1:-1]:
        x += dk
        sirs.append(float(sir_uav_hop(scenario, dk, x, h)))
    sirs.append(float(sir_rx_hop(scenario, d[-1], h)))
    return sirs


def sir_system_chain(sirs: Sequence[float]) -> float:
    if len(sirs) == 0:
        raise EmptyChain("no hop SIRs given")
    return min(sirs)


def to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def from_db(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)
