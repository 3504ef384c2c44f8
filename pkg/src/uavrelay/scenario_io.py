"""Scenario files: JSON documents with every Scenario and ChannelParams field.

Layout (SI units throughout: metres, watts, hertz, m/s)::

    {
      "distance_tx_rx_m": 1000.0, "msi_x_m": 500.0, "msi_y_m": 400.0,
      "power_tx_w": 80.0, "power_uav_w": 1.0, "power_msi_w": 80.0,
      "altitude_min_m": 20.0, "altitude_max_m": 100.0, "min_uav_spacing_m": 4.0,
      "channel": {"carrier_frequency_hz": 2e9, "excess_loss_los": 1.023...,
                  "excess_loss_nlos": 125.89..., "path_loss_exponent": 2.0,
                  "speed_of_light": 299792458.0, "eta_nlos": null},
      "run": {"gamma_db": 10.0, "altitude_m": 20.0},
      "sweep": [{"parameter": "gamma_db", "values": [0, 1, 2]}]
    }

``run`` (optional) holds defaults for the run parameters below; command-line
flags override it. ``sweep`` (optional) lists parameters to vary; the sweep
runs over the cartesian product of all value lists, in file order with the
last block varying fastest. A sweep parameter is a scenario field, a channel
field written ``channel.<name>``, or a run parameter.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, fields
from pathlib import Path

from .channel import ChannelParams, Scenario
from .errors import ConfigError

SCENARIO_KEYS = tuple(f.name for f in fields(Scenario) if f.name != "channel")
CHANNEL_KEYS = tuple(f.name for f in fields(ChannelParams) if f.init)
RUN_KEYS = ("gamma_db", "altitude_m", "x_m", "n_uavs", "step_m", "max_iterations",
            "grid_x_m", "grid_h_m", "trials", "seed")
TOP_KEYS = set(SCENARIO_KEYS) | {"channel", "run", "sweep"}


@dataclass(frozen=True)
class SweepBlock:
    parameter: str
    values: tuple


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    run: dict
    sweep: tuple[SweepBlock, ...]

    def points(self):
        """(assignment dict, Scenario, run dict) for every sweep combination."""
        names = [b.parameter for b in self.sweep]
        for combo in itertools.product(*(b.values for b in self.sweep)):
            assign = dict(zip(names, combo))
            yield assign, apply_assignment(self.scenario, assign), {
                **self.run, **{k: v for k, v in assign.items() if k in RUN_KEYS}}


def _number(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number, got {v!r}")
    return v


def _check_keys(where, doc, allowed, required):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {', '.join(missing)}")


def _valid_parameter(name: str) -> bool:
    if name.startswith("channel."):
        return name[len("channel."):] in CHANNEL_KEYS
    return name in SCENARIO_KEYS or name in RUN_KEYS


def channel_fields(ch: ChannelParams) -> dict:
    """Init fields of ``ch``; eta_nlos comes back as None when it tracks mu_nlos."""
    out = {k: getattr(ch, k) for k in CHANNEL_KEYS}
    if ch.eta_nlos == ch.mu_nlos:
        out["eta_nlos"] = None
    return out


def apply_assignment(sc: Scenario, assign: dict) -> Scenario:
    top = {k: v for k, v in assign.items() if k in SCENARIO_KEYS}
    ch = {k[len("channel."):]: v for k, v in assign.items() if k.startswith("channel.")}
    if ch:
        base = channel_fields(sc.channel)
        top["channel"] = ChannelParams(**{**base, **ch})
    return sc.with_(**top) if top else sc


def parse_document(doc) -> ScenarioFile:
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must hold a JSON object")
    _check_keys("scenario", doc, TOP_KEYS, SCENARIO_KEYS + ("channel",))
    ch_doc = doc["channel"]
    if not isinstance(ch_doc, dict):
        raise ConfigError("channel must be an object")
    _check_keys("channel", ch_doc, CHANNEL_KEYS, CHANNEL_KEYS)
    ch_args = {k: (None if k == "eta_nlos" and ch_doc[k] is None else _number(f"channel.{k}", ch_doc[k]))
               for k in CHANNEL_KEYS}
    channel = ChannelParams(**ch_args)
    scenario = Scenario(**{k: _number(k, doc[k]) for k in SCENARIO_KEYS}, channel=channel)

    run = doc.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("run must be an object")
    _check_keys("run", run, RUN_KEYS, ())
    run = {k: _number(k, v) for k, v in run.items()}

    blocks = []
    for i, b in enumerate(doc.get("sweep", [])):
        if not isinstance(b, dict):
            raise ConfigError(f"sweep[{i}] must be an object")
        _check_keys(f"sweep[{i}]", b, ("parameter", "values"), ("parameter", "values"))
        name, values = b["parameter"], b["values"]
        if not isinstance(name, str) or not _valid_parameter(name):
            raise ConfigError(f"sweep[{i}]: unknown parameter {name!r}")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep[{i}]: values must be a non-empty list")
        blocks.append(SweepBlock(name, tuple(_number(name, v) for v in values)))
    if len({b.parameter for b in blocks}) != len(blocks):
        raise ConfigError("a parameter appears in more than one sweep block")
    return ScenarioFile(scenario, run, tuple(blocks))


def to_document(sf: ScenarioFile) -> dict:
    sc = sf.scenario
    doc = {k: getattr(sc, k) for k in SCENARIO_KEYS}
    doc["channel"] = channel_fields(sc.channel)
    if sf.run:
        doc["run"] = dict(sf.run)
    if sf.sweep:
        doc["sweep"] = [{"parameter": b.parameter, "values": list(b.values)} for b in sf.sweep]
    return doc


def dumps(sf: ScenarioFile) -> str:
    return json.dumps(to_document(sf), indent=2) + "\n"


def loads(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from None
    return parse_document(doc)


def load(path) -> ScenarioFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return loads(text)


def digest(sf: ScenarioFile) -> str:
    canon = json.dumps(to_document(sf), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
