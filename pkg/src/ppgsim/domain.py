"""Core energy types and the per-slot battery/consumption arithmetic.

All quantities are joules per time slot. Batteries are ideal: no
charge/discharge or leakage losses, capped at capacity and clamped at zero.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class SimClock:
    """Discrete time base: slot index t, slot length tau, TDM mini-slot length."""

    slot_index: int = 0
    slot_duration_s: float = 60.0
    mini_slot_duration_s: float = 5.0

    def __post_init__(self) -> None:
        if self.slot_index < 0:
            raise ValueError(f"slot_index must be >= 0, got {self.slot_index}")
        if self.slot_duration_s <= 0 or self.mini_slot_duration_s <= 0:
            raise ValueError("slot and mini-slot durations must be positive")
        ratio = self.slot_duration_s / self.mini_slot_duration_s
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError(
                "slot_duration_s must be a positive integer multiple of "
                f"mini_slot_duration_s ({self.slot_duration_s}/{self.mini_slot_duration_s})"
            )

    @property
    def minislots_per_slot(self) -> int:
        return round(self.slot_duration_s / self.mini_slot_duration_s)

    def advanced(self) -> "SimClock":
        return dataclasses.replace(self, slot_index=self.slot_index + 1)


@dataclass(frozen=True)
class EnergyBuffer:
    """Battery state plus its fixed thresholds.

    level_J is the stored energy; low_threshold_J is the floor no station
    should sink below, up_threshold_J the desired level above which the
    excess is tradeable.
    """

    level_J: float
    capacity_J: float
    low_threshold_J: float
    up_threshold_J: float

    def __post_init__(self) -> None:
        if not (0 < self.low_threshold_J < self.up_threshold_J < self.capacity_J):
            raise ValueError(
                "thresholds must satisfy 0 < low < up < capacity, got "
                f"low={self.low_threshold_J} up={self.up_threshold_J} "
                f"cap={self.capacity_J}"
            )
        if not (0 <= self.level_J <= self.capacity_J):
            raise ValueError(
                f"level {self.level_J} outside [0, {self.capacity_J}]"
            )

    def with_level(self, level_J: float) -> "EnergyBuffer":
        return dataclasses.replace(self, level_J=level_J)


@dataclass(frozen=True)
class BaseStation:
    """Static identity of one base station on the grid."""

    id: int
    row: int
    col: int
    grid_connected: bool
    buffer: EnergyBuffer
    load_profile_id: int = 0
    idle_energy_J: float = 6_000.0
    max_load_energy_J: float = 18_000.0

    @property
    def node(self) -> tuple[int, int]:
        return (self.row, self.col)


@dataclass(frozen=True)
class HarvestSample:
    slot_index: int
    solar_J: float
    wind_J: float

    def __post_init__(self) -> None:
        if self.solar_J < 0 or self.wind_J < 0:
            raise ValueError("harvested energy cannot be negative")


class RoleKind(Enum):
    SOURCE = "source"
    CONSUMER = "consumer"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class BsRole:
    """Per-slot trading role: a source offers amount_J, a consumer needs it."""

    kind: RoleKind
    amount_J: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is RoleKind.NEUTRAL and self.amount_J != 0.0:
            raise ValueError("neutral role carries no energy amount")
        if self.kind is not RoleKind.NEUTRAL and self.amount_J <= 0.0:
            raise ValueError(f"{self.kind.value} role requires a positive amount")

    @property
    def is_source(self) -> bool:
        return self.kind is RoleKind.SOURCE

    @property
    def is_consumer(self) -> bool:
        return self.kind is RoleKind.CONSUMER


def load_energy(load_fraction: float, bs: BaseStation) -> float:
    """Load-dependent energy for one slot, linear in the normalized load."""
    if not (0.0 <= load_fraction <= 1.0):
        raise ValueError(f"load_fraction must be in [0, 1], got {load_fraction}")
    return load_fraction * bs.max_load_energy_J


def bs_consumption(bs: BaseStation, load_fraction: float) -> float:
    """Total slot consumption: constant idle draw plus the load term."""
    return bs.idle_energy_J + load_energy(load_fraction, bs)


def classify_role(buffer: EnergyBuffer, grid_connected: bool) -> BsRole:
    """Decide source/consumer/neutral from the reported buffer level.

    Levels strictly above the upper threshold are tradeable surplus. An
    off-grid station strictly below the lower threshold demands the gap.
    Grid-connected stations are never consumers; they cover deficits by
    purchasing from the grid.
    """
    if buffer.level_J > buffer.up_threshold_J:
        return BsRole(RoleKind.SOURCE, buffer.level_J - buffer.up_threshold_J)
    if buffer.level_J < buffer.low_threshold_J and not grid_connected:
        return BsRole(RoleKind.CONSUMER, buffer.low_threshold_J - buffer.level_J)
    return BsRole(RoleKind.NEUTRAL)


def eb_step_offgrid(
    buffer: EnergyBuffer,
    harvested_J: float,
    consumed_J: float,
    transferred_J: float,
) -> EnergyBuffer:
    """Advance an off-grid battery one slot.

    transferred_J is signed: positive when the station received energy,
    negative when it sent some. The result is capped at capacity and
    clamped at zero (an empty battery cannot go negative; the engine logs
    the shortfall).
    """
    if harvested_J < 0 or consumed_J < 0:
        raise ValueError("harvested_J and consumed_J must be >= 0")
    new_level = buffer.level_J + harvested_J - consumed_J + transferred_J
    new_level = min(new_level, buffer.capacity_J)
    new_level = max(new_level, 0.0)
    return buffer.with_level(new_level)


def eb_step_ongrid(
    buffer: EnergyBuffer,
    harvested_J: float,
    consumed_J: float,
    transferred_J: float,
    purchased_J: float,
) -> EnergyBuffer:
    """Advance an on-grid battery one slot; purchases add on top of flows.

    The zero floor applies before the purchase: a battery drained empty
    mid-slot is refilled from zero, so a purchase sized against the
    (clamped) provisional level always lands the station at its upper
    threshold.
    """
    if purchased_J < 0:
        raise ValueError("purchased_J must be >= 0")
    if harvested_J < 0 or consumed_J < 0:
        raise ValueError("harvested_J and consumed_J must be >= 0")
    provisional = max(buffer.level_J + harvested_J - consumed_J + transferred_J, 0.0)
    new_level = min(provisional + purchased_J, buffer.capacity_J)
    return buffer.with_level(new_level)


def grid_purchase(buffer: EnergyBuffer) -> float:
    """Energy a grid-connected station buys to reach its upper threshold.

    Call on the provisional end-of-slot level (after harvest, consumption
    and transfers). Returns zero when the level is already at or above the
    threshold.
    """
    return max(buffer.up_threshold_J - buffer.level_J, 0.0)
