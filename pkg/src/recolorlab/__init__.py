"""Capacitated online and fully dynamic recoloring: algorithms, adaptive
adversaries, exact oracles and an experiment harness."""

from .core import (
    CapacityViolation,
    ColoringState,
    ComponentTracker,
    CostLedger,
    InfeasibleInstance,
    Instance,
    InvalidInstance,
    OddComponent,
    RecolorError,
    Request,
    StepReport,
    optimal_orientation,
    recolor,
)
from .delta import DeltaRecoloring, equitable_coloring
from .follow_greedy import FollowGreedy
from .fully_dynamic import GreedyRecoloring
from .rebalance2 import Assignment, Infeasible, rebalance_exact, rebalance_fptas

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CapacityViolation",
    "ColoringState",
    "ComponentTracker",
    "CostLedger",
    "DeltaRecoloring",
    "FollowGreedy",
    "GreedyRecoloring",
    "Infeasible",
    "InfeasibleInstance",
    "Instance",
    "InvalidInstance",
    "OddComponent",
    "RecolorError",
    "Request",
    "StepReport",
    "equitable_coloring",
    "optimal_orientation",
    "rebalance_exact",
    "rebalance_fptas",
    "recolor",
]
