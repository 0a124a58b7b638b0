"""Per-slot source-to-consumer energy allocation.

Three interchangeable policies produce AllocationDecision lists from the
same slot snapshot (demands, remaining surpluses, hop counts, loss model):

* ``lyapunov`` - consumers served priority-first; for each, sources are
  split into those able to cover the demand and those that cannot, each
  sorted by hop count; the nearest adequate source wins, with the
  drift-plus-penalty score breaking ties between equally near candidates.
* ``radial`` - a two-ring neighborhood search around the consumer.
* ``random`` - a uniform draw over all current sources.

All policies debit a source's remaining surplus as decisions are made, so
later consumers in the same slot see updated availability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ConfigError

HopsFn = Callable[[int, int], int]
FractionFn = Callable[[int], float]

POLICIES = ("lyapunov", "radial", "random")


@dataclass(frozen=True)
class AllocationDecision:
    """One source-to-consumer transfer order for the current slot.

    gross_J leaves the source; fraction of it survives the route; shortfall
    marks decisions whose source could not cover the full demand.
    """

    source_id: int
    consumer_id: int
    gross_J: float
    fraction: float
    hops: int
    shortfall: bool = False

    def __post_init__(self) -> None:
        if self.gross_J <= 0:
            raise ValueError(f"gross_J must be positive, got {self.gross_J}")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.hops < 0:
            raise ValueError("hop count cannot be negative")

    @property
    def delivered_J(self) -> float:
        return self.gross_J * self.fraction


class VirtualQueues:
    """Per-station control queues driving the drift term; start at zero."""

    def __init__(self, ids: Iterable[int]) -> None:
        self.values: dict[int, float] = {n: 0.0 for n in ids}

    def get(self, bs_id: int) -> float:
        return self.values[bs_id]

    def advance(self, bs_id: int, delivered_J: float, cap_J: float) -> None:
        self.values[bs_id] = queue_update(self.values[bs_id], delivered_J, cap_J)


def queue_update(queue_J: float, delivered_J: float, cap_J: float) -> float:
    """Queue recursion: grow by the slot's delivered energy, drain by the cap."""
    if queue_J < 0 or delivered_J < 0 or cap_J < 0:
        raise ValueError("queue inputs must be >= 0")
    return max(queue_J + delivered_J - cap_J, 0.0)


def p2_score(queue_J: float, consumption_J: float, lam: float, delivered_J: float) -> float:
    """Drift-plus-penalty objective: queue * consumption + lam * delivered."""
    if lam < 0:
        raise ValueError("control weight must be >= 0")
    return queue_J * consumption_J + lam * delivered_J


def deliverable(
    source: int,
    available: Mapping[int, float],
    hops_to: Mapping[int, int],
    fraction_of: FractionFn,
) -> float:
    """Energy the source can land at the consumer: surplus net of route losses."""
    return available[source] * fraction_of(hops_to[source])


def eligible_sources(
    available: Mapping[int, float],
    hops_to: Mapping[int, int],
    fraction_of: FractionFn,
    demand_J: float,
) -> tuple[list[int], list[int]]:
    """Split sources by whether their deliverable energy covers the demand.

    The comparison uses the loss-adjusted amount (what actually arrives
    after per-hop losses), so a set_ge pick always restores the full
    demand. Returns (can_cover, cannot_cover); both sorted ascending by
    hop count, ties broken by lower station id. Sources with no surplus
    left are dropped.
    """
    order = sorted((s for s in available if available[s] > 0.0), key=lambda s: (hops_to[s], s))
    set_ge = [s for s in order if deliverable(s, available, hops_to, fraction_of) >= demand_J]
    set_lt = [s for s in order if deliverable(s, available, hops_to, fraction_of) < demand_J]
    return set_ge, set_lt


def _decision_for(
    source: int,
    consumer: int,
    available: Mapping[int, float],
    hops: int,
    fraction_of: FractionFn,
    demand_J: float,
) -> AllocationDecision:
    """Gross-up the demand for route losses, capped by remaining surplus."""
    fraction = fraction_of(hops)
    gross = min(demand_J / fraction, available[source])
    return AllocationDecision(
        source_id=source,
        consumer_id=consumer,
        gross_J=gross,
        fraction=fraction,
        hops=hops,
        shortfall=available[source] * fraction < demand_J,
    )


def lyapunov_pick(
    consumer: int,
    demand_J: float,
    available: Mapping[int, float],
    hops_to: Mapping[int, int],
    fraction_of: FractionFn,
    queue_J: float,
    consumption_J: float,
    lam: float,
) -> AllocationDecision | None:
    """Choose one source for one consumer under the drift-plus-penalty rule.

    Adequate sources are preferred; among those at the minimum hop count the
    candidate with the lowest drift-plus-penalty score wins (ids break exact
    ties, being the sort order). When no source can cover the demand the
    nearest inadequate one sends everything it has, flagged as a shortfall.
    """
    set_ge, set_lt = eligible_sources(available, hops_to, fraction_of, demand_J)
    pool = set_ge if set_ge else set_lt
    if not pool:
        return None
    best_hops = hops_to[pool[0]]
    best: AllocationDecision | None = None
    best_score = float("inf")
    for s in pool:
        if hops_to[s] != best_hops:
            break  # pool is hop-sorted; only minimum-hop candidates compete
        if set_ge:
            candidate = _decision_for(s, consumer, available, best_hops, fraction_of, demand_J)
        else:
            fraction = fraction_of(best_hops)
            candidate = AllocationDecision(s, consumer, available[s], fraction, best_hops, shortfall=True)
        score = p2_score(queue_J, consumption_J, lam, candidate.delivered_J)
        if score < best_score:
            best, best_score = candidate, score
    return best


RADIAL_MAX_RINGS = 2


def radial_allocate(
    consumer: int,
    demand_J: float,
    available: Mapping[int, float],
    hops_to: Mapping[int, int],
    fraction_of: FractionFn,
) -> AllocationDecision | None:
    """Benchmark: scan the consumer's neighbors, then neighbors-of-neighbors.

    The search stops after two rings; within the first ring holding any
    source the lowest station id wins regardless of how much it can give.
    """
    for ring in range(1, RADIAL_MAX_RINGS + 1):
        hits = sorted(s for s in available if available[s] > 0.0 and hops_to[s] == ring)
        if hits:
            return _decision_for(hits[0], consumer, available, ring, fraction_of, demand_J)
    return None


def random_allocate(
    consumer: int,
    demand_J: float,
    available: Mapping[int, float],
    hops_to: Mapping[int, int],
    fraction_of: FractionFn,
    rng: random.Random,
) -> AllocationDecision | None:
    """Benchmark: pick uniformly over every station with surplus left."""
    pool = sorted(s for s in available if available[s] > 0.0)
    if not pool:
        return None
    source = rng.choice(pool)
    return _decision_for(source, consumer, available, hops_to[source], fraction_of, demand_J)


def consumer_order(demands: Mapping[int, float], priority: frozenset[int]) -> list[int]:
    """Consumers currently serving associated users first, then the rest; id order within each group."""
    first = sorted(c for c in demands if c in priority)
    rest = sorted(c for c in demands if c not in priority)
    return first + rest


def lyapunov_allocate(
    demands: Mapping[int, float],
    priority: frozenset[int],
    surpluses: Mapping[int, float],
    hops_fn: HopsFn,
    fraction_of: FractionFn,
    queues: Mapping[int, float],
    consumptions: Mapping[int, float],
    lam: float,
) -> tuple[list[AllocationDecision], list[int]]:
    """Run the drift-plus-penalty policy over a whole slot.

    consumptions holds the latest known per-station consumption (the
    previous slot's, since the current slot's load is only known at its
    end). Returns the decision list plus the ids of consumers no source
    could serve at all.
    """
    available = dict(surpluses)
    decisions: list[AllocationDecision] = []
    outages: list[int] = []
    for consumer in consumer_order(demands, priority):
        hops_to = {s: hops_fn(s, consumer) for s in available}
        picked = lyapunov_pick(
            consumer,
            demands[consumer],
            available,
            hops_to,
            fraction_of,
            queues.get(consumer, 0.0),
            consumptions.get(consumer, 0.0),
            lam,
        )
        if picked is None:
            outages.append(consumer)
            continue
        available[picked.source_id] -= picked.gross_J
        decisions.append(picked)
    return decisions, outages


def benchmark_allocate(
    policy: str,
    demands: Mapping[int, float],
    priority: frozenset[int],
    surpluses: Mapping[int, float],
    hops_fn: HopsFn,
    fraction_of: FractionFn,
    rng: random.Random,
) -> tuple[list[AllocationDecision], list[int]]:
    """Shared slot driver for the radial and random source searches."""
    if policy not in ("radial", "random"):
        raise ConfigError(f"unknown benchmark policy {policy!r}")
    available = dict(surpluses)
    decisions: list[AllocationDecision] = []
    outages: list[int] = []
    for consumer in consumer_order(demands, priority):
        hops_to = {s: hops_fn(s, consumer) for s in available}
        if policy == "radial":
            picked = radial_allocate(consumer, demands[consumer], available, hops_to, fraction_of)
        else:
            picked = random_allocate(consumer, demands[consumer], available, hops_to, fraction_of, rng)
        if picked is None:
            outages.append(consumer)
            continue
        available[picked.source_id] -= picked.gross_J
        decisions.append(picked)
    return decisions, outages


def allocate_slot(
    policy: str,
    demands: Mapping[int, float],
    priority: frozenset[int],
    surpluses: Mapping[int, float],
    hops_fn: HopsFn,
    fraction_of: FractionFn,
    queues: Mapping[int, float],
    consumptions: Mapping[int, float],
    lam: float,
    rng: random.Random,
) -> tuple[list[AllocationDecision], list[int]]:
    """Dispatch one slot's allocation to the configured policy."""
    if policy == "lyapunov":
        return lyapunov_allocate(
            demands, priority, surpluses, hops_fn, fraction_of, queues, consumptions, lam
        )
    return benchmark_allocate(policy, demands, priority, surpluses, hops_fn, fraction_of, rng)


@dataclass(frozen=True)
class TheoremDiagnostic:
    """Empirical check of the time-average penalty bound.

    lhs is the time average of delivered energy per slot; rhs the target
    value plus the queue-dependent constant. Reported, never enforced.
    """

    lhs: float
    rhs: float
    target_value: float
    lam: float
    satisfied: bool
    skipped: bool = False
    note: str = ""


def theorem1_report(
    delivered_per_slot: Sequence[float],
    queue_histories: Mapping[int, Sequence[float]],
    lam: float,
    cap_J: float,
    target_value: float | None = None,
) -> TheoremDiagnostic:
    """Compare the run's mean delivered energy against its theoretical bound.

    The bound is target + (1 / (2 lam)) * (sum of mean queue values - cap)^2.
    With lam == 0 the bound is undefined and the diagnostic is skipped.
    The default target is the run's own time-average demand, supplied by
    the caller via target_value.
    """
    if not delivered_per_slot:
        raise ValueError("need at least one slot of history")
    lhs = sum(delivered_per_slot) / len(delivered_per_slot)
    target = 0.0 if target_value is None else target_value
    if lam == 0.0:
        return TheoremDiagnostic(
            lhs=lhs, rhs=float("nan"), target_value=target, lam=lam,
            satisfied=False, skipped=True, note="control weight is zero; bound undefined",
        )
    mean_queue_sum = sum(
        sum(history) / len(history) for history in queue_histories.values() if history
    )
    rhs = target + (mean_queue_sum - cap_J) ** 2 / (2.0 * lam)
    return TheoremDiagnostic(
        lhs=lhs, rhs=rhs, target_value=target, lam=lam, satisfied=lhs <= rhs,
    )
