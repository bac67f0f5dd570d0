from __future__ import annotations

import math

import numpy as np
import pytest

from btembed import (
    CellResult,
    InvalidSpecError,
    SeparationResult,
    SweepSpec,
    make_embedding,
    make_sweep_schema,
    random_tree,
    run_list_sweep,
    run_parse_sweep,
    run_separation_probe,
    run_sweep,
    run_tree_sweep,
)
from btembed.harness import (
    SEPARATION_CSV_HEADER,
    SWEEP_CSV_HEADER,
    cell_seed,
    chain_tree,
    jl_bound,
    separation_csv,
    sweep_csv,
    trial_rng,
    write_separation_csv,
    write_sweep_csv,
)


class TestSweepSchema:
    def test_shape(self):
        s = make_sweep_schema(5, 2)
        assert s.tokens == ("t0", "t1", "t2", "t3", "t4", "next", "arg1")
        assert s.attributes == ("next", "arg1")

    def test_single_attribute(self):
        s = make_sweep_schema(3, 1)
        assert s.attributes == ("next",)


class TestSweepSpec:
    def test_valid(self):
        spec = SweepSpec(kind="list", dims=[64, 128], sizes=[2, 4], trials=5)
        assert spec.dims == (64, 128)
        assert spec.sizes == (2, 4)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="blob", dims=(64,), sizes=(2,), trials=1),
            dict(kind="list", dims=(), sizes=(2,), trials=1),
            dict(kind="list", dims=(1,), sizes=(2,), trials=1),
            dict(kind="list", dims=(64,), sizes=(), trials=1),
            dict(kind="list", dims=(64,), sizes=(0,), trials=1),
            dict(kind="parse", dims=(64,), sizes=(3,), trials=1),
            dict(kind="list", dims=(64,), sizes=(2,), trials=0),
            dict(kind="list", dims=(64,), sizes=(2,), trials=1, base_seed=-1),
            dict(kind="list", dims=(64,), sizes=(2,), trials=1, n_tokens=0),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSpecError):
            SweepSpec(**kwargs)

    def test_kind_mismatch_with_runner(self):
        spec = SweepSpec(kind="list", dims=(64,), sizes=(2,), trials=1)
        with pytest.raises(InvalidSpecError):
            run_tree_sweep(spec)
        with pytest.raises(InvalidSpecError):
            run_parse_sweep(spec)


class TestSeeding:
    def test_cell_seed_deterministic_and_distinct(self):
        assert cell_seed(0, 2, 512, 8) == cell_seed(0, 2, 512, 8)
        seeds = {
            cell_seed(0, 2, 512, 8),
            cell_seed(0, 2, 512, 9),
            cell_seed(0, 2, 256, 8),
            cell_seed(0, 1, 512, 8),
            cell_seed(1, 2, 512, 8),
        }
        assert len(seeds) == 5

    def test_trial_rng_streams(self):
        a = trial_rng(0, 1, 64, 2, 0).integers(1 << 30, size=4)
        b = trial_rng(0, 1, 64, 2, 0).integers(1 << 30, size=4)
        c = trial_rng(0, 1, 64, 2, 1).integers(1 << 30, size=4)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)


class TestGenerators:
    def test_random_tree_size(self):
        rng = np.random.default_rng(120)
        for size in (1, 2, 5, 12):
            t = random_tree(size, 10, 3, rng)
            assert t.node_count() == size

    def test_random_tree_respects_attribute_count(self):
        rng = np.random.default_rng(121)
        t = random_tree(20, 10, 2, rng)
        for path, _ in t.paths():
            assert all(a < 2 for a in path)

    def test_single_attribute_gives_chains(self):
        rng = np.random.default_rng(122)
        t = random_tree(6, 10, 1, rng)
        depths = [len(p) for p, _ in t.paths()]
        assert sorted(depths) == [0, 1, 2, 3, 4, 5]

    def test_deterministic(self):
        a = random_tree(8, 10, 3, np.random.default_rng(123))
        b = random_tree(8, 10, 3, np.random.default_rng(123))
        assert a == b

    def test_chain_tree(self):
        e = make_embedding(make_sweep_schema(6, 1), 32, 0)
        t = chain_tree(e, [3, 1, 2])
        nxt = e.schema.attribute_index("next")
        assert t.label == 3
        assert t.child(nxt).label == 1
        assert t.child(nxt).child(nxt).label == 2
        assert t.node_count() == 3


class TestSweeps:
    def test_list_sweep_clean_regime(self):
        spec = SweepSpec(kind="list", dims=(256,), sizes=(2, 4), trials=6)
        results = run_list_sweep(spec)
        assert len(results) == 2
        for r in results:
            assert r.kind == "list"
            assert r.d == 256
            assert r.trials == 6
            assert r.successes == 6
            assert r.success_rate == 1.0
            assert r.wall_time_ms >= 0.0

    def test_tree_sweep_clean_regime(self):
        spec = SweepSpec(kind="tree", dims=(256,), sizes=(2, 3), trials=6)
        for r in run_tree_sweep(spec):
            assert r.successes == 6

    def test_parse_sweep_clean_regime(self):
        spec = SweepSpec(kind="parse", dims=(512,), sizes=(2, 4), trials=6)
        for r in run_parse_sweep(spec):
            assert r.successes == 6

    def test_tree_sweep_noise_regime(self):
        # far past the capacity boundary the round trip must mostly fail
        spec = SweepSpec(kind="tree", dims=(64,), sizes=(20,), trials=6)
        (r,) = run_tree_sweep(spec)
        assert r.success_rate < 0.5

    def test_run_sweep_dispatch(self):
        spec = SweepSpec(kind="list", dims=(128,), sizes=(2,), trials=3)
        direct = run_list_sweep(spec)
        routed = run_sweep(spec)
        assert [(r.successes, r.l) for r in routed] == [(r.successes, r.l) for r in direct]


class TestSeparation:
    def test_jl_bound_values(self):
        assert jl_bound(0, 60, 512) == pytest.approx(4.0 * math.sqrt(math.log(60) / 512))
        assert jl_bound(3, 60, 512) == pytest.approx(math.sqrt(32.0 * math.log(60) / 512))
        # a depth-0 probe gets the tighter plain constant
        assert jl_bound(0, 60, 512) < jl_bound(1, 60, 512)

    def test_probe_in_bounds(self):
        e = make_embedding(make_sweep_schema(8, 3), 512, 40)
        for depth in (0, 3):
            r = run_separation_probe(e, depth, 60, np.random.default_rng(41))
            assert r.d == 512
            assert r.samples == 60
            assert 0.0 < r.max_abs_ip < r.jl_bound
            assert r.violations == 0

    def test_probe_deterministic(self):
        e = make_embedding(make_sweep_schema(8, 3), 256, 42)
        a = run_separation_probe(e, 2, 40, np.random.default_rng(43))
        b = run_separation_probe(e, 2, 40, np.random.default_rng(43))
        assert a == b

    def test_probe_validation(self):
        e = make_embedding(make_sweep_schema(8, 3), 64, 44)
        with pytest.raises(InvalidSpecError):
            run_separation_probe(e, 2, 1, np.random.default_rng(0))
        with pytest.raises(InvalidSpecError):
            run_separation_probe(e, -1, 10, np.random.default_rng(0))


class TestCsv:
    ROWS = [
        CellResult("tree", 128, 4, 10, 9, 0.9, 12.3456),
        CellResult("tree", 128, 8, 10, 10, 1.0, 7.0),
    ]

    def test_sweep_csv_golden(self):
        assert sweep_csv(self.ROWS) == (
            SWEEP_CSV_HEADER + "\n"
            "tree,128,4,10,9,0.900000,\n"
            "tree,128,8,10,10,1.000000,\n"
        )

    def test_sweep_csv_with_timings(self):
        out = sweep_csv(self.ROWS, timings=True)
        assert "tree,128,4,10,9,0.900000,12.346\n" in out

    def test_separation_csv_golden(self):
        rows = [SeparationResult(512, 3, 60, 0.1234567, 0.5058824, 0)]
        assert separation_csv(rows) == (
            SEPARATION_CSV_HEADER + "\n" + "512,3,60,0.123457,0.505882,0\n"
        )

    def test_rerun_is_byte_identical(self, tmp_path):
        spec = SweepSpec(kind="list", dims=(128,), sizes=(2, 3), trials=4)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_sweep_csv(run_list_sweep(spec), a)
        write_sweep_csv(run_list_sweep(spec), b)
        assert a.read_bytes() == b.read_bytes()

    def test_separation_rerun_byte_identical(self, tmp_path):
        e = make_embedding(make_sweep_schema(8, 3), 128, 45)
        rows_a = [run_separation_probe(e, 2, 30, np.random.default_rng(46))]
        rows_b = [run_separation_probe(e, 2, 30, np.random.default_rng(46))]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_separation_csv(rows_a, a)
        write_separation_csv(rows_b, b)
        assert a.read_bytes() == b.read_bytes()
