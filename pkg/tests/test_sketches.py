import random

import pytest
from hypothesis import given, strategies as st

from subcubehh.sketches import (
    CountMin,
    MisraGries,
    Reservoir,
    SNAPSHOT_MAGIC,
    sketch_from_bytes,
    sketch_to_bytes,
)


class TestMisraGries:
    def test_hand_simulation(self):
        # budget 2, stream [1,1,2,3,1]: the arrival of 3 decrements {1:2,2:1}
        # to {1:1} and is not inserted; the final 1 brings it back to 2.
        sk = MisraGries(2)
        for x in [1, 1, 2, 3, 1]:
            sk.update(x)
        assert sk.counters == {1: 2}
        assert sk.estimate(1) == 2  # true count 3, error 1 <= m/c = 2.5
        assert sk.estimate(3) == 0
        assert sk.estimate(2) == 0

    def test_empty_sketch(self):
        sk = MisraGries(4)
        for x in range(10):
            assert sk.estimate(x) == 0

    def test_exact_when_budget_covers_support(self):
        stream = [1, 2, 3, 1, 2, 1] * 3
        sk = MisraGries(3)
        for x in stream:
            sk.update(x)
        for x in {1, 2, 3}:
            assert sk.estimate(x) == stream.count(x)

    def test_budget_bound_never_exceeded(self):
        sk = MisraGries(3)
        rng = random.Random(5)
        for _ in range(500):
            sk.update(rng.randrange(20))
            assert len(sk.counters) <= 3

    def test_zero_budget_tracks_nothing(self):
        sk = MisraGries(0)
        for x in [1, 2, 1, 1]:
            sk.update(x)
        assert sk.counters == {}
        assert sk.estimate(1) == 0
        assert sk.processed == 4

    @given(
        st.lists(st.integers(0, 7), min_size=1, max_size=60),
        st.sampled_from([1, 2, 4, 8]),
    )
    def test_two_sided_bound_on_every_prefix(self, stream, budget):
        sk = MisraGries(budget)
        true = {}
        for x in stream:
            sk.update(x)
            true[x] = true.get(x, 0) + 1
            bound = sk.processed / budget
            for y, ty in true.items():
                est = sk.estimate(y)
                assert est <= ty
                assert est >= ty - bound


class TestCountMin:
    def test_single_value_exact(self):
        sk = CountMin(width=16, depth=1, seed=3)
        sk.update(9)
        sk.update(9)
        assert sk.point_query(9) == 2

    def test_one_sided(self):
        sk = CountMin(width=4, depth=2, seed=1)
        true = {}
        rng = random.Random(0)
        for _ in range(300):
            x = rng.randrange(12)
            sk.update(x)
            true[x] = true.get(x, 0) + 1
        for x, t in true.items():
            assert sk.point_query(x) >= t

    def test_total_collision_degenerate(self):
        sk = CountMin(width=1, depth=1)
        for x in [10, 11, 12]:
            sk.update(x)
        assert sk.point_query(10) == 3

    def test_bulk_update_equals_repeated(self):
        a = CountMin(width=8, depth=3, seed=7)
        b = CountMin(width=8, depth=3, seed=7)
        for _ in range(5):
            a.update(42)
        b.update(42, 5)
        assert a.table == b.table
        assert a.processed == b.processed

    def test_rejects_bad_geometry(self):
        from subcubehh.errors import ConfigError

        with pytest.raises(ConfigError):
            CountMin(width=0)
        with pytest.raises(ConfigError):
            CountMin(width=4, depth=0)

    def test_zero_count_update_is_noop(self):
        sk = CountMin(width=4, depth=2, seed=0)
        sk.update(7, 0)
        assert sk.processed == 0
        assert sk.point_query(7) == 0

    def test_negative_count_rejected(self):
        from subcubehh.errors import ConfigError

        sk = CountMin(width=4, depth=2, seed=0)
        with pytest.raises(ConfigError):
            sk.update(7, -1)


class TestReservoir:
    def test_under_capacity_keeps_all_in_order(self):
        res = Reservoir(10, seed=1)
        stream = [(i,) for i in range(5)]
        for item in stream:
            res.update(item)
        assert res.samples == stream
        assert res.seen == 5

    def test_zero_capacity(self):
        res = Reservoir(0, seed=1)
        for i in range(20):
            res.update((i,))
        assert res.samples == []
        assert res.seen == 20

    def test_deterministic_given_seed(self):
        def run(seed):
            res = Reservoir(3, seed=seed)
            for i in range(50):
                res.update((i,))
            return res.samples

        assert run(11) == run(11)
        assert run(11) != run(12)  # different draws almost surely diverge

    def test_final_sample_uniform_chi_squared(self):
        # capacity 1, stream of 8: the survivor should be uniform over the 8.
        n, trials = 8, 10_000
        hits = [0] * n
        for seed in range(trials):
            res = Reservoir(1, seed=seed)
            for i in range(n):
                res.update((i,))
            hits[res.samples[0][0]] += 1
        expected = trials / n
        chi2 = sum((h - expected) ** 2 / expected for h in hits)
        # 0.99 quantile of chi-squared with 7 degrees of freedom.
        assert chi2 < 18.4753

    def test_inclusion_probability(self):
        # capacity 2 over 6 items: each item kept with probability 1/3.
        runs, length, capacity = 12_000, 6, 2
        inclusion = [0] * length
        for seed in range(runs):
            res = Reservoir(capacity, seed=seed)
            for i in range(length):
                res.update((i,))
            for item in res.samples:
                inclusion[item[0]] += 1
        p = capacity / length
        sigma = (p * (1 - p) / runs) ** 0.5
        for count in inclusion:
            assert abs(count / runs - p) <= 3 * sigma


class TestSnapshots:
    def test_magic(self):
        assert sketch_to_bytes(MisraGries(2))[:4] == SNAPSHOT_MAGIC == b"SHH1"

    def test_misra_gries_roundtrip(self):
        sk = MisraGries(3)
        for x in [5, 5, 9, 2, 5, 9]:
            sk.update(x)
        back = sketch_from_bytes(sketch_to_bytes(sk))
        assert isinstance(back, MisraGries)
        assert back.counters == sk.counters
        assert back.counter_budget == sk.counter_budget
        assert back.processed == sk.processed

    def test_count_min_roundtrip(self):
        sk = CountMin(width=8, depth=4, seed=99)
        for x in range(30):
            sk.update(x % 5)
        back = sketch_from_bytes(sketch_to_bytes(sk))
        assert isinstance(back, CountMin)
        assert back.table == sk.table
        assert back.row_seeds == sk.row_seeds
        assert back.processed == sk.processed

    def test_reservoir_roundtrip_and_resume(self):
        # A snapshot taken mid-stream must continue exactly like the original.
        full = Reservoir(4, seed=21)
        half = Reservoir(4, seed=21)
        stream = [(i, i + 1) for i in range(40)]
        for item in stream[:20]:
            full.update(item)
            half.update(item)
        resumed = sketch_from_bytes(sketch_to_bytes(half))
        for item in stream[20:]:
            full.update(item)
            resumed.update(item)
        assert resumed.samples == full.samples
        assert resumed.seen == full.seen

    def test_save_load_file(self, tmp_path):
        from subcubehh.sketches import load_sketch, save_sketch

        sk = CountMin(width=4, depth=2, seed=5)
        sk.update(3, 7)
        path = tmp_path / "sketch.shh"
        save_sketch(sk, path)
        back = load_sketch(path)
        assert back.table == sk.table

    def test_rejects_garbage(self):
        from subcubehh.errors import SubcubeHHError

        with pytest.raises(SubcubeHHError):
            sketch_from_bytes(b"NOPE" + b"\x00" * 20)
