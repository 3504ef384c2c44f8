"""Relay UAV placement between a transmitter and receiver in the presence of a
dominant ground interferer."""

__version__ = "0.1.0"

from .channel import ChannelParams, Position, Scenario, SirPair, from_db, sir_chain, sir_single, to_db
from .distributed import DistributedConfig, DistributedTrace, run_distributed
from .multi import MultiUavPlan, PlanRequest, feasibility_bound, max_gamma_for_n, plan_min_uavs
from .single import PlacementResult, optimal_h_fixed_x, optimal_position_free, optimal_x_fixed_h

__all__ = [
    "ChannelParams", "Position", "Scenario", "SirPair", "from_db", "sir_chain", "sir_single", "to_db",
    "DistributedConfig", "DistributedTrace", "run_distributed",
    "MultiUavPlan", "PlanRequest", "feasibility_bound", "max_gamma_for_n", "plan_min_uavs",
    "PlacementResult", "optimal_h_fixed_x", "optimal_position_free", "optimal_x_fixed_h",
]
