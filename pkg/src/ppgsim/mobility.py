"""Group mobility for vehicle-mounted user groups on a two-lane highway.

Each group is one vehicle carrying a handful of users; the group reference
point moves at constant signed speed along the highway axis (the grid's
long axis) and wraps around at the world edge. Member offsets are re-drawn
inside a bounded radius every step. Associations go to the nearest base
station, lowest id on ties.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence


@dataclass(frozen=True)
class VueGroup:
    group_id: int
    x_m: float
    y_m: float
    velocity_mps: float  # signed, along the highway axis; no U-turns mid-run
    lane: int
    member_offsets: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class AssociationSnapshot:
    slot_index: int
    serving: frozenset[int]


def bs_world_positions(rows: int, cols: int, spacing_m: float) -> dict[int, tuple[float, float]]:
    """World (x, y) of each station; ids row-major, x along columns."""
    return {
        r * cols + c: (c * spacing_m, r * spacing_m)
        for r in range(rows)
        for c in range(cols)
    }


def _draw_offset(rng: random.Random, radius_m: float) -> tuple[float, float]:
    # rejection sampling keeps the draw uniform over the disk
    while True:
        dx = rng.uniform(-radius_m, radius_m)
        dy = rng.uniform(-radius_m, radius_m)
        if dx * dx + dy * dy <= radius_m * radius_m:
            return (dx, dy)


def make_groups(
    rng: random.Random,
    n_groups: int,
    members_per_group: int,
    world_length_m: float,
    lane_y_m: Sequence[float],
    speed_range_mps: tuple[float, float],
    offset_radius_m: float,
) -> list[VueGroup]:
    """Spawn groups at random highway positions, alternating lanes.

    Lane 0 drives in +x, lane 1 in -x; the speed magnitude is drawn once
    per group and kept for the whole run.
    """
    groups = []
    for g in range(n_groups):
        lane = g % len(lane_y_m)
        speed = rng.uniform(*speed_range_mps)
        groups.append(
            VueGroup(
                group_id=g,
                x_m=rng.uniform(0.0, world_length_m),
                y_m=lane_y_m[lane],
                velocity_mps=speed if lane == 0 else -speed,
                lane=lane,
                member_offsets=tuple(
                    _draw_offset(rng, offset_radius_m) for _ in range(members_per_group)
                ),
            )
        )
    return groups


def rpgm_step(
    group: VueGroup,
    tau_s: float,
    world_length_m: float,
    offset_radius_m: float,
    rng: random.Random,
) -> VueGroup:
    """Advance one slot: move the reference point, re-draw member offsets."""
    new_x = (group.x_m + group.velocity_mps * tau_s) % world_length_m
    offsets = tuple(_draw_offset(rng, offset_radius_m) for _ in group.member_offsets)
    return replace(group, x_m=new_x, member_offsets=offsets)


def nearest_bs(x_m: float, y_m: float, bs_xy: Mapping[int, tuple[float, float]]) -> int:
    best_id = -1
    best_d = math.inf
    for bs_id in sorted(bs_xy):
        bx, by = bs_xy[bs_id]
        d = (bx - x_m) ** 2 + (by - y_m) ** 2
        if d < best_d:  # strict: lowest id wins exact ties
            best_d = d
            best_id = bs_id
    return best_id


def association_set(
    slot_index: int,
    groups: Sequence[VueGroup],
    bs_xy: Mapping[int, tuple[float, float]],
) -> AssociationSnapshot:
    """Stations currently serving at least one vehicle group."""
    serving = frozenset(nearest_bs(g.x_m, g.y_m, bs_xy) for g in groups)
    return AssociationSnapshot(slot_index=slot_index, serving=serving)


def trajectory_rows(slot_index: int, groups: Sequence[VueGroup], bs_xy: Mapping[int, tuple[float, float]]) -> list[tuple[int, int, float, float, int]]:
    """Debug dump rows: (slot, group, x, y, serving_bs), one per vehicle."""
    return [
        (slot_index, g.group_id, g.x_m, g.y_m, nearest_bs(g.x_m, g.y_m, bs_xy))
        for g in groups
    ]
