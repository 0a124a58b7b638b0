"""Power packet grid topology: grid graph, static min-hop routes, line
resistance, per-hop delivery losses, and TDM link reservation state.

Nodes are (row, col) tuples; one base station sits on each node and every
4-adjacent pair is joined by a single identical DC link. Mini-slot indices
are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, LinkBusyError

Node = tuple[int, int]
LinkKey = tuple[Node, Node]


def line_resistance(resistivity: float, length_m: float, cross_section_mm2: float) -> float:
    """Resistance of one power link, rho * length / area."""
    if resistivity <= 0 or length_m <= 0 or cross_section_mm2 <= 0:
        raise ValueError(
            "resistivity, length and cross-section must all be positive, got "
            f"({resistivity}, {length_m}, {cross_section_mm2})"
        )
    return resistivity * length_m / cross_section_mm2


def link_key(a: Node, b: Node) -> LinkKey:
    """Canonical undirected key for the link between two adjacent nodes."""
    return (a, b) if a <= b else (b, a)


@dataclass
class PowerLink:
    """One DC link with its TDM reservation calendar for the current slot.

    At most one transfer may hold the link in any mini-slot. Reservations
    are half-open [start, end) mini-slot ranges and are wiped by clear()
    at each slot boundary.
    """

    endpoints: LinkKey
    _reservations: list[tuple[int, int]] = field(default_factory=list)

    def reserve(self, start: int, end: int) -> None:
        if end <= start:
            raise ValueError(f"empty mini-slot range [{start}, {end})")
        for s, e in self._reservations:
            if start < e and s < end:
                raise LinkBusyError(
                    f"link {self.endpoints} busy in [{s}, {e}), "
                    f"requested [{start}, {end})"
                )
        self._reservations.append((start, end))

    def release(self, start: int, end: int) -> None:
        try:
            self._reservations.remove((start, end))
        except ValueError:
            raise ValueError(
                f"no reservation [{start}, {end}) on link {self.endpoints}"
            ) from None

    def is_free(self, start: int, end: int) -> bool:
        return all(not (start < e and s < end) for s, e in self._reservations)

    def clear(self) -> None:
        self._reservations.clear()

    @property
    def reservations(self) -> tuple[tuple[int, int], ...]:
        return tuple(self._reservations)

    @property
    def occupied_until_mini_slot(self) -> int | None:
        if not self._reservations:
            return None
        return max(e for _, e in self._reservations)


@dataclass(frozen=True)
class Route:
    """Ordered node path from source to consumer."""

    hops: tuple[Node, ...]

    def __post_init__(self) -> None:
        if len(self.hops) < 2:
            raise ValueError("a route needs at least two nodes")
        for a, b in zip(self.hops, self.hops[1:]):
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise ValueError(f"nodes {a} and {b} are not adjacent")

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1

    def links(self) -> tuple[LinkKey, ...]:
        return tuple(link_key(a, b) for a, b in zip(self.hops, self.hops[1:]))


class PpgGrid:
    """Rectangular power packet grid with identical links between 4-neighbors."""

    def __init__(
        self,
        rows: int = 4,
        cols: int = 6,
        link_length_m: float = 100.0,
        resistivity: float = 0.023,
        cross_section_mm2: float = 10.0,
        dc_voltage_V: float = 380.0,
    ) -> None:
        if rows < 1 or cols < 1:
            raise ConfigError(f"grid must be at least 1x1, got {rows}x{cols}")
        if dc_voltage_V <= 0:
            raise ConfigError("dc_voltage_V must be positive")
        self.rows = rows
        self.cols = cols
        self.link_length_m = link_length_m
        self.resistivity = resistivity
        self.cross_section_mm2 = cross_section_mm2
        self.dc_voltage_V = dc_voltage_V
        self.links: dict[LinkKey, PowerLink] = {}
        for r in range(rows):
            for c in range(cols):
                if r + 1 < rows:
                    key = link_key((r, c), (r + 1, c))
                    self.links[key] = PowerLink(key)
                if c + 1 < cols:
                    key = link_key((r, c), (r, c + 1))
                    self.links[key] = PowerLink(key)

    @property
    def line_resistance_ohm(self) -> float:
        return line_resistance(self.resistivity, self.link_length_m, self.cross_section_mm2)

    def nodes(self) -> list[Node]:
        return [(r, c) for r in range(self.rows) for c in range(self.cols)]

    def in_bounds(self, node: Node) -> bool:
        r, c = node
        return 0 <= r < self.rows and 0 <= c < self.cols

    def _check(self, node: Node) -> None:
        if not self.in_bounds(node):
            raise ValueError(f"node {node} outside {self.rows}x{self.cols} grid")

    def hop_count(self, a: Node, b: Node) -> int:
        """Shortest-path length between two nodes (Manhattan distance)."""
        self._check(a)
        self._check(b)
        return abs(a[0] - b[0]) + abs(a[1] - b[1])

    def static_route(self, a: Node, b: Node) -> Route:
        """Deterministic min-hop route: walk rows first, then columns."""
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError(f"no route from {a} to itself")
        hops = [a]
        r, c = a
        step_r = 1 if b[0] > r else -1
        while r != b[0]:
            r += step_r
            hops.append((r, c))
        step_c = 1 if b[1] > c else -1
        while c != b[1]:
            c += step_c
            hops.append((r, c))
        return Route(tuple(hops))

    def link_between(self, a: Node, b: Node) -> PowerLink:
        key = link_key(a, b)
        if key not in self.links:
            raise ValueError(f"no link between {a} and {b}")
        return self.links[key]

    def clear_reservations(self) -> None:
        for link in self.links.values():
            link.clear()


def per_hop_loss(resistance_ohm: float, link_power_W: float, voltage_V: float) -> float:
    """Fraction of energy dissipated per hop at nominal link power.

    Resistive loss at current I = P/U is I^2 * R, i.e. a fraction
    R * P / U^2 of the transported power.
    """
    if resistance_ohm <= 0 or link_power_W <= 0 or voltage_V <= 0:
        raise ValueError("resistance, power and voltage must be positive")
    return resistance_ohm * link_power_W / voltage_V**2


@dataclass(frozen=True)
class LossModel:
    """Per-hop multiplicative delivery loss over the grid."""

    hop_loss: float

    def __post_init__(self) -> None:
        if not (0.0 < self.hop_loss < 1.0):
            raise ConfigError(
                f"per-hop loss must lie in (0, 1), got {self.hop_loss}; "
                "check cable constants, link power and bus voltage"
            )

    def delivered_fraction(self, hops: int) -> float:
        """Fraction of sent energy surviving a route of the given hop count."""
        if hops < 0:
            raise ValueError(f"hop count must be >= 0, got {hops}")
        return (1.0 - self.hop_loss) ** hops


def loss_model_for(grid: PpgGrid, phi_max_J: float, mini_slot_duration_s: float) -> LossModel:
    """Loss model at the link's nominal power phi_max per mini-slot."""
    if phi_max_J <= 0 or mini_slot_duration_s <= 0:
        raise ConfigError("phi_max_J and mini_slot_duration_s must be positive")
    link_power = phi_max_J / mini_slot_duration_s
    return LossModel(per_hop_loss(grid.line_resistance_ohm, link_power, grid.dc_voltage_V))
