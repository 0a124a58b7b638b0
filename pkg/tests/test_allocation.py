"""Allocation policies: source splitting, drift-plus-penalty, benchmarks."""

import random

import pytest

from ppgsim.allocation import (
    AllocationDecision,
    VirtualQueues,
    allocate_slot,
    benchmark_allocate,
    consumer_order,
    deliverable,
    eligible_sources,
    lyapunov_allocate,
    lyapunov_pick,
    p2_score,
    queue_update,
    radial_allocate,
    random_allocate,
    theorem1_report,
)
from ppgsim.errors import ConfigError
from ppgsim.topology import PpgGrid, loss_model_for

GRID = PpgGrid()
LOSS = loss_model_for(GRID, 100e3, 5.0)
FRACTION = LOSS.delivered_fraction


def hops_between(positions):
    def hops(s, c):
        (r1, c1), (r2, c2) = positions[s], positions[c]
        return abs(r1 - r2) + abs(c1 - c2)
    return hops


class TestEligibleSources:
    def test_split_and_sort_by_hops(self):
        available = {1: 50e3, 2: 30e3}
        hops_to = {1: 2, 2: 1}
        set_ge, set_lt = eligible_sources(available, hops_to, FRACTION, 27e3)
        assert set_ge == [2, 1]
        assert set_lt == []

    def test_loss_adjusted_split(self):
        # 28 kJ at two hops only lands ~26.2 kJ, below a 27 kJ demand
        available = {1: 28e3, 2: 30e3}
        hops_to = {1: 2, 2: 1}
        set_ge, set_lt = eligible_sources(available, hops_to, FRACTION, 27e3)
        assert set_ge == [2]
        assert set_lt == [1]

    def test_empty(self):
        assert eligible_sources({}, {}, FRACTION, 1.0) == ([], [])

    def test_tie_broken_by_id(self):
        available = {7: 40e3, 3: 40e3}
        hops_to = {7: 2, 3: 2}
        set_ge, _ = eligible_sources(available, hops_to, FRACTION, 10e3)
        assert set_ge == [3, 7]

    def test_zero_surplus_dropped(self):
        set_ge, set_lt = eligible_sources({1: 0.0}, {1: 1}, FRACTION, 10e3)
        assert set_ge == [] and set_lt == []


class TestQueueUpdate:
    def test_overflow(self):
        assert queue_update(480e3, 20e3, 490e3) == pytest.approx(10e3)

    def test_zero_state(self):
        assert queue_update(0.0, 0.0, 490e3) == 0.0

    def test_floors_at_zero(self):
        assert queue_update(100e3, 50e3, 490e3) == 0.0

    def test_never_negative_fuzzed(self):
        rng = random.Random(9)
        for _ in range(2000):
            q = rng.uniform(0, 600e3)
            v = rng.uniform(0, 200e3)
            cap = rng.uniform(0, 600e3)
            assert queue_update(q, v, cap) >= 0.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            queue_update(-1.0, 0.0, 490e3)


class TestP2Score:
    def test_both_terms(self):
        assert p2_score(10.0, 5.0, 1.0, 20.0) == 70.0

    def test_zero_weight_disables_penalty(self):
        assert p2_score(10.0, 5.0, 0.0, 20.0) == 50.0

    def test_empty_queue_leaves_penalty(self):
        assert p2_score(0.0, 5.0, 1.0, 20.0) == 20.0

    def test_scaling_weight_preserves_argmin(self):
        # with equal drift terms the comparison is invariant to the weight
        rng = random.Random(21)
        for _ in range(200):
            q, c = rng.uniform(0, 1e5), rng.uniform(0, 1e5)
            d1, d2 = rng.uniform(0, 1e5), rng.uniform(0, 1e5)
            lam = rng.uniform(1e-3, 10.0)
            k = rng.uniform(1e-3, 100.0)
            base = p2_score(q, c, lam, d1) < p2_score(q, c, lam, d2)
            scaled = p2_score(q, c, lam * k, d1) < p2_score(q, c, lam * k, d2)
            assert base == scaled


class TestLyapunovPick:
    def test_grosses_up_for_losses(self):
        available = {1: 50e3, 2: 30e3}
        hops_to = {1: 2, 2: 1}
        picked = lyapunov_pick(9, 27e3, available, hops_to, FRACTION, 0.0, 0.0, 1.0)
        assert picked.source_id == 2
        assert picked.hops == 1
        assert picked.gross_J == pytest.approx(27e3 / FRACTION(1))
        assert picked.delivered_J == pytest.approx(27e3)
        assert not picked.shortfall

    def test_falls_back_to_inadequate_set(self):
        available = {4: 10e3}
        hops_to = {4: 1}
        picked = lyapunov_pick(9, 27e3, available, hops_to, FRACTION, 0.0, 0.0, 1.0)
        assert picked.shortfall
        assert picked.gross_J == 10e3
        assert picked.delivered_J == pytest.approx(10e3 * FRACTION(1))

    def test_no_sources(self):
        assert lyapunov_pick(9, 27e3, {}, {}, FRACTION, 0.0, 0.0, 1.0) is None

    def test_min_hop_matches_brute_force(self):
        rng = random.Random(33)
        for _ in range(300):
            n_sources = rng.randint(1, 10)
            available = {i: rng.uniform(1e3, 150e3) for i in range(n_sources)}
            hops_to = {i: rng.randint(1, 8) for i in range(n_sources)}
            demand = rng.uniform(1e3, 120e3)
            picked = lyapunov_pick(99, demand, available, hops_to, FRACTION, 0.0, 0.0, 1.0)
            adequate = [s for s in available if deliverable(s, available, hops_to, FRACTION) >= demand]
            if adequate:
                assert picked.source_id in adequate
                assert hops_to[picked.source_id] == min(hops_to[s] for s in adequate)
            else:
                assert picked.shortfall

    def test_weight_does_not_change_unique_min_hop_choice(self):
        available = {1: 60e3, 2: 80e3}
        hops_to = {1: 1, 2: 3}
        picks = {
            lam: lyapunov_pick(9, 20e3, available, hops_to, FRACTION, 5e3, 10e3, lam).source_id
            for lam in (0.0, 1.0, 7.5)
        }
        assert set(picks.values()) == {1}


class TestLyapunovAllocate:
    def test_priority_consumers_first(self):
        demands = {3: 10e3, 8: 10e3, 1: 10e3}
        order = consumer_order(demands, priority=frozenset({8}))
        assert order == [8, 1, 3]

    def test_source_debited_across_consumers(self):
        positions = {0: (0, 0), 1: (0, 1), 2: (0, 2)}
        demands = {1: 20e3, 2: 20e3}
        surpluses = {0: 25e3}
        decisions, outages = lyapunov_allocate(
            demands, frozenset(), surpluses, hops_between(positions), FRACTION, {}, {}, 1.0
        )
        total_gross = sum(d.gross_J for d in decisions if d.source_id == 0)
        assert total_gross <= 25e3 + 1e-9
        assert len(decisions) == 2
        # second consumer sees the debited availability and takes what is left
        assert decisions[1].shortfall

    def test_outage_when_no_source(self):
        decisions, outages = lyapunov_allocate(
            {5: 10e3}, frozenset(), {}, lambda s, c: 1, FRACTION, {}, {}, 1.0
        )
        assert decisions == []
        assert outages == [5]


class TestRadial:
    def test_ring_one_beats_ring_two(self):
        available = {10: 50e3, 20: 50e3}
        hops_to = {10: 1, 20: 2}
        picked = radial_allocate(9, 10e3, available, hops_to, FRACTION)
        assert picked.source_id == 10

    def test_ring_two_when_ring_one_empty(self):
        available = {20: 50e3}
        hops_to = {20: 2}
        picked = radial_allocate(9, 10e3, available, hops_to, FRACTION)
        assert picked.source_id == 20
        assert picked.hops == 2

    def test_stops_after_two_rings(self):
        available = {30: 50e3}
        hops_to = {30: 3}
        assert radial_allocate(9, 10e3, available, hops_to, FRACTION) is None

    def test_lowest_id_wins_within_ring(self):
        available = {6: 50e3, 2: 50e3}
        hops_to = {6: 1, 2: 1}
        assert radial_allocate(9, 10e3, available, hops_to, FRACTION).source_id == 2

    def test_caps_at_surplus(self):
        available = {2: 5e3}
        hops_to = {2: 1}
        picked = radial_allocate(9, 10e3, available, hops_to, FRACTION)
        assert picked.gross_J == 5e3
        assert picked.shortfall


class TestRandom:
    def test_single_source(self):
        picked = random_allocate(9, 10e3, {4: 50e3}, {4: 3}, FRACTION, random.Random(1))
        assert picked.source_id == 4

    def test_empty(self):
        assert random_allocate(9, 10e3, {}, {}, FRACTION, random.Random(1)) is None

    def test_seeded_reproducibility(self):
        available = {i: 50e3 for i in range(6)}
        hops_to = {i: i + 1 for i in range(6)}
        picks1 = [
            random_allocate(9, 10e3, available, hops_to, FRACTION, random.Random(77)).source_id
            for _ in range(1)
        ]
        picks2 = [
            random_allocate(9, 10e3, available, hops_to, FRACTION, random.Random(77)).source_id
            for _ in range(1)
        ]
        assert picks1 == picks2


class TestSlotDrivers:
    def test_unknown_policy_rejected(self):
        with pytest.raises(ConfigError):
            benchmark_allocate("greedy", {}, frozenset(), {}, lambda s, c: 1, FRACTION, random.Random(1))

    def test_dispatch_matches_direct_call(self):
        positions = {0: (0, 0), 1: (0, 1)}
        args = ({1: 10e3}, frozenset(), {0: 50e3}, hops_between(positions), FRACTION)
        direct, _ = lyapunov_allocate(*args, {}, {}, 1.0)
        routed, _ = allocate_slot("lyapunov", *args, {}, {}, 1.0, random.Random(1))
        assert direct == routed


class TestVirtualQueues:
    def test_starts_at_zero_and_advances(self):
        q = VirtualQueues([1, 2])
        assert q.get(1) == 0.0
        q.advance(1, 500e3, 490e3)
        assert q.get(1) == pytest.approx(10e3)


class TestTheoremDiagnostic:
    def test_zero_penalty(self):
        report = theorem1_report([0.0, 0.0], {0: [0.0, 0.0]}, 1.0, 490e3, target_value=0.0)
        assert report.lhs == 0.0
        assert report.satisfied

    def test_arithmetic_mean(self):
        report = theorem1_report([10.0, 20.0], {0: [0.0, 0.0]}, 1.0, 490e3, target_value=15.0)
        assert report.lhs == pytest.approx(15.0)

    def test_zero_weight_skipped(self):
        report = theorem1_report([10.0], {0: [0.0]}, 0.0, 490e3, target_value=0.0)
        assert report.skipped

    def test_bound_value(self):
        report = theorem1_report([10.0], {0: [5.0], 1: [15.0]}, 2.0, 100.0, target_value=3.0)
        assert report.rhs == pytest.approx(3.0 + (20.0 - 100.0) ** 2 / 4.0)

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            theorem1_report([], {}, 1.0, 490e3)


def test_decision_validates_inputs():
    with pytest.raises(ValueError):
        AllocationDecision(0, 1, 0.0, 0.9, 1)
    with pytest.raises(ValueError):
        AllocationDecision(0, 1, 10.0, 1.5, 1)
    with pytest.raises(ValueError):
        AllocationDecision(0, 1, 10.0, 0.9, -1)
