"""Execute allocation decisions over the grid.

Each decision becomes a TransferJob: a static route, a mini-slot count for
the delivered energy, and reservations on every link of the route. Jobs
contending for a link are serialized in decision order; a job pushed past
the response deadline still completes but is flagged as an overrun.

Losses are debited at the source: the source sends the gross amount, the
consumer receives the surviving fraction, the difference is dissipated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .allocation import AllocationDecision
from .errors import ConfigError
from .topology import LinkKey, Node, PpgGrid, Route


def mini_slot_count(delivered_J: float, phi_max_J: float) -> int:
    """Mini-slots needed to move the delivered energy at phi_max per mini-slot."""
    if phi_max_J <= 0:
        raise ConfigError(f"phi_max_J must be positive, got {phi_max_J}")
    if delivered_J < 0:
        raise ValueError("delivered_J must be >= 0")
    if delivered_J == 0:
        return 0
    return math.ceil(delivered_J / phi_max_J)


def link_occupancy(mini_slots: int, mini_slot_duration_s: float, processing_delay_s: float) -> float:
    """Wall time a transfer holds its links: transmission plus processing delay."""
    if mini_slots < 0:
        raise ValueError("mini_slots must be >= 0")
    return mini_slots * mini_slot_duration_s + processing_delay_s


@dataclass
class TransferJob:
    """One scheduled transfer: route, slot timing, and completion status."""

    job_id: int
    decision: AllocationDecision
    route: Route
    mini_slots: int
    start_mini_slot: int
    occupancy_s: float
    completion_s: float
    status: str = "done"  # "done" | "overrun"

    @property
    def overrun(self) -> bool:
        return self.status == "overrun"


@dataclass(frozen=True)
class LinkGrant:
    """Audit row: one link held by one job for a mini-slot range."""

    slot: int
    link: LinkKey
    start_mini_slot: int
    end_mini_slot: int
    job_id: int


@dataclass
class TransferOutcome:
    """Per-slot result of executing all transfers."""

    net_flow_J: dict[int, float] = field(default_factory=dict)
    jobs: list[TransferJob] = field(default_factory=list)
    grants: list[LinkGrant] = field(default_factory=list)

    def flow(self, bs_id: int) -> float:
        return self.net_flow_J.get(bs_id, 0.0)


def _earliest_start(grid: PpgGrid, route: Route, length: int) -> int:
    """First mini-slot index at which every link of the route is free for `length` slots."""
    start = 0
    while True:
        conflict_end = None
        for key in route.links():
            link = grid.links[key]
            for s, e in link.reservations:
                if start < e and s < start + length:
                    conflict_end = e if conflict_end is None else max(conflict_end, e)
        if conflict_end is None:
            return start
        start = conflict_end


def execute_transfers(
    decisions: Sequence[AllocationDecision],
    grid: PpgGrid,
    positions: Mapping[int, Node],
    slot_index: int,
    mini_slot_duration_s: float,
    processing_delay_s: float,
    phi_max_J: float,
    deadline_s: float,
) -> TransferOutcome:
    """Schedule and execute one slot's transfers under per-link TDM.

    Links must be free at entry (the engine clears reservations at each
    slot boundary). Every job completes within the model - energy always
    arrives - but a completion time past deadline_s marks the job overrun.
    """
    outcome = TransferOutcome()
    for job_id, decision in enumerate(decisions):
        delivered = decision.delivered_J
        route = grid.static_route(positions[decision.source_id], positions[decision.consumer_id])
        y = mini_slot_count(delivered, phi_max_J)
        occupancy = link_occupancy(y, mini_slot_duration_s, processing_delay_s)
        start = _earliest_start(grid, route, y) if y > 0 else 0
        completion = (start + y) * mini_slot_duration_s + processing_delay_s
        for key in route.links():
            if y > 0:
                grid.links[key].reserve(start, start + y)
                outcome.grants.append(LinkGrant(slot_index, key, start, start + y, job_id))
        status = "overrun" if completion > deadline_s else "done"
        outcome.jobs.append(
            TransferJob(
                job_id=job_id,
                decision=decision,
                route=route,
                mini_slots=y,
                start_mini_slot=start,
                occupancy_s=occupancy,
                completion_s=completion,
                status=status,
            )
        )
        outcome.net_flow_J[decision.consumer_id] = outcome.flow(decision.consumer_id) + delivered
        outcome.net_flow_J[decision.source_id] = outcome.flow(decision.source_id) - decision.gross_J
    return outcome
