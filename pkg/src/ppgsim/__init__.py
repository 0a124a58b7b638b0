"""Discrete-time simulator for energy cooperation between energy-harvesting
base stations connected by a power packet grid."""

from .allocation import AllocationDecision, TheoremDiagnostic, VirtualQueues
from .domain import BaseStation, BsRole, EnergyBuffer, RoleKind, SimClock
from .engine import RunResult, SimConfig, Simulation, compare, run, sweep_lambda
from .errors import ConfigError, LinkBusyError, TraceFormatError
from .ingest import HarvestTraceSet, LoadProfileSet
from .topology import LossModel, PpgGrid, Route
from .transfer import TransferJob

__version__ = "0.1.0"

__all__ = [
    "AllocationDecision",
    "BaseStation",
    "BsRole",
    "ConfigError",
    "EnergyBuffer",
    "HarvestTraceSet",
    "LinkBusyError",
    "LoadProfileSet",
    "LossModel",
    "PpgGrid",
    "RoleKind",
    "Route",
    "RunResult",
    "SimClock",
    "SimConfig",
    "Simulation",
    "TheoremDiagnostic",
    "TraceFormatError",
    "TransferJob",
    "VirtualQueues",
    "compare",
    "run",
    "sweep_lambda",
    "__version__",
]
