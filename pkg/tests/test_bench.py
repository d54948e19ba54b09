"""Gap metric, plans, BKS cache, record files, and the run dispatcher."""

import numpy as np
import pytest

from nebm import (
    BenchmarkPlan,
    GeometricSchedule,
    LinearSchedule,
    MissingBksError,
    compute_bks,
    config_hash,
    ensure_bks,
    evaluate_cost,
    gap_percent,
    generate_mis_graph,
    load_bks,
    load_records,
    mis_bks_cost,
    mis_to_qubo,
    RefractoryPolicy,
    run_plan,
    run_solver,
    save_bks,
    save_records,
    save_summary,
    solve_qubo,
    summarize,
)
from nebm.bench import (
    BKS_HEADER,
    RESULTS_HEADER,
    SUMMARY_HEADER,
    fmt_density,
    instance_key,
    load_assignments,
)


class TestGapPercent:
    def test_exact_match_is_zero(self):
        assert gap_percent(-20, -20) == 0.0

    def test_zero_cost_is_hundred(self):
        assert gap_percent(0, -7) == 100.0

    def test_positive_cost_truncated(self):
        assert gap_percent(55, -7) == 100.0

    def test_hand_value(self):
        assert gap_percent(-15, -20) == 25.0

    def test_requires_negative_bks(self):
        with pytest.raises(ValueError):
            gap_percent(-5, 0)
        with pytest.raises(ValueError):
            gap_percent(-5, 3)

    def test_endpoints_for_random_bks(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            bks = -int(rng.integers(1, 10_000))
            assert gap_percent(bks, bks) == 0.0
            assert gap_percent(0, bks) == 100.0

    def test_monotone_and_bounded(self):
        rng = np.random.default_rng(1)
        for _ in range(10_000):
            bks = -int(rng.integers(1, 1000))
            c = int(rng.integers(bks, 500))
            g = gap_percent(c, bks)
            assert 0.0 <= g <= 100.0
            # One step closer to the optimum never increases the gap.
            if c > bks:
                assert gap_percent(c - 1, bks) <= g


class TestFormatting:
    def test_density_text_is_canonical(self):
        assert fmt_density(0.05) == "0.05"
        assert fmt_density(0.30) == "0.3"
        assert fmt_density(0.15) == "0.15"
        assert instance_key(10, 0.30, 2) == (10, "0.3", 2)

    def test_config_hash_properties(self):
        a = config_hash({"name": "nebm", "r_min": 1})
        b = config_hash({"r_min": 1, "name": "nebm"})
        assert a == b
        assert len(a) == 12
        assert int(a, 16) >= 0
        assert config_hash({"name": "nebm", "r_min": 2}) != a


class TestBenchmarkPlan:
    def test_default_grid_shape(self):
        plan = BenchmarkPlan()
        cells = list(plan.instances())
        assert len(cells) == 7 * 3 * 5
        assert cells[0] == (10, 0.05, 0)

    def test_from_dict_rejects_unknown_fields(self):
        with pytest.raises(ValueError, match="unknown plan fields"):
            BenchmarkPlan.from_dict({"nodes": [10], "sweeps": 3})

    def test_from_dict_converts_lists(self):
        plan = BenchmarkPlan.from_dict(
            {"nodes": [10], "densities": [0.3], "instance_seeds": [0, 1]}
        )
        assert plan.nodes == (10,)
        assert list(plan.instances()) == [(10, 0.3, 0), (10, 0.3, 1)]

    def test_validation(self):
        with pytest.raises(ValueError):
            BenchmarkPlan(budget_kind="minutes")
        with pytest.raises(ValueError):
            BenchmarkPlan(budgets=(0,))
        with pytest.raises(ValueError):
            BenchmarkPlan(repetitions=0)
        with pytest.raises(ValueError):
            BenchmarkPlan(penalty=1)
        with pytest.raises(ValueError):
            BenchmarkPlan(solvers=({"name": "cplex"},))


class TestBksCache:
    def test_exact_for_small_instances(self):
        cost, prov = compute_bks(10, 0.3, 0)
        assert prov == "exact"
        assert cost == mis_bks_cost(generate_mis_graph(10, 0.3, 0))
        assert cost < 0

    def test_tabu_provenance_for_large_instances(self):
        cost, prov = compute_bks(40, 0.15, 1, tabu_sweeps=300)
        assert prov == "tabu:300"
        assert cost < 0
        again, _ = compute_bks(40, 0.15, 1, tabu_sweeps=300)
        assert again == cost

    def test_ensure_fills_only_missing(self):
        plan = BenchmarkPlan(
            nodes=(10,), densities=(0.3,), instance_seeds=(0, 1), repetitions=1
        )
        cache = {}
        added = ensure_bks(plan, cache)
        assert len(added) == 2
        assert ensure_bks(plan, cache) == []

    def test_round_trip(self, tmp_path):
        cache = {
            (10, "0.3", 0): (-5, "exact"),
            (50, "0.15", 2): (-21, "tabu:10000"),
        }
        path = tmp_path / "bks.csv"
        save_bks(path, cache)
        assert load_bks(path) == cache
        assert path.read_text().splitlines()[0] == BKS_HEADER

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n")
        with pytest.raises(ValueError, match="header"):
            load_bks(path)


def small_plan(**overrides):
    base = dict(
        nodes=(10,),
        densities=(0.3,),
        instance_seeds=(0,),
        solvers=({"name": "sa"}, {"name": "tabu"}),
        budgets=(50,),
        repetitions=5,
    )
    base.update(overrides)
    return BenchmarkPlan(**base)


class TestRunPlan:
    def test_cardinality(self):
        records = run_plan(small_plan())
        assert len(records) == 1 * 2 * 1 * 5

    def test_records_are_coherent(self):
        records = run_plan(small_plan())
        g = generate_mis_graph(10, 0.3, 0)
        q = mis_to_qubo(g)
        for rec in records:
            assert 0.0 <= rec.gap_percent <= 100.0
            assert rec.best_cost == evaluate_cost(q, rec.assignment)
            assert rec.bks_cost == mis_bks_cost(g)
            assert rec.steps <= 50

    def test_small_instances_get_inline_exact_bks(self):
        cache = {}
        run_plan(small_plan(), cache)
        key = instance_key(10, 0.3, 0)
        assert cache[key][1] == "exact"

    def test_large_instances_require_cache(self):
        plan = small_plan(nodes=(40,))
        with pytest.raises(MissingBksError, match="bks subcommand"):
            run_plan(plan)
        # With a cache entry present the plan runs.
        cache = {instance_key(40, 0.3, 0): compute_bks(40, 0.3, 0, tabu_sweeps=200)}
        records = run_plan(plan, cache)
        assert len(records) == 10

    def test_step_mode_is_reproducible(self):
        rows_a = [r.csv_row() for r in run_plan(small_plan())]
        rows_b = [r.csv_row() for r in run_plan(small_plan())]
        # Wall time differs; everything before it must not.
        strip = lambda row: row.rsplit(",", 1)[0]
        assert [strip(r) for r in rows_a] == [strip(r) for r in rows_b]

    def test_parallel_solver_hits_frozen_quality_bar(self):
        # n=10, d=0.3 grid at a 10^4-step budget: every gap at most 20,
        # mean at most 5.
        plan = BenchmarkPlan(
            nodes=(10,),
            densities=(0.3,),
            instance_seeds=(0, 1, 2, 3, 4),
            solvers=({"name": "nebm"},),
            budgets=(10_000,),
            repetitions=5,
        )
        records = run_plan(plan)
        gaps = [r.gap_percent for r in records]
        assert max(gaps) <= 20.0
        assert sum(gaps) / len(gaps) <= 5.0


class TestRunSolver:
    def setup_method(self):
        g = generate_mis_graph(10, 0.3, 0)
        self.q = mis_to_qubo(g)

    def test_unknown_solver_name(self):
        with pytest.raises(ValueError, match="unknown solver"):
            run_solver({"name": "cplex"}, self.q, 0, "steps", 10)

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError, match="unknown solver parameters"):
            run_solver({"name": "sa", "tenure": 3}, self.q, 0, "steps", 10)
        with pytest.raises(ValueError, match="unknown solver parameters"):
            run_solver({"name": "nebm", "sweeps": 5}, self.q, 0, "steps", 10)

    def test_bad_budget_kind(self):
        with pytest.raises(ValueError, match="budget_kind"):
            run_solver({"name": "sa"}, self.q, 0, "minutes", 10)

    def test_trace_only_for_parallel_solver(self):
        import io

        with pytest.raises(ValueError, match="trace"):
            run_solver({"name": "sa"}, self.q, 0, "steps", 10, trace=io.StringIO())

    def test_schedule_spec_matches_direct_call(self):
        spec = {
            "name": "nebm",
            "schedule": "linear",
            "t0": 30,
            "delta": 2,
            "refresh": 5,
            "r_min": 0,
            "r_max": 0,
        }
        via_spec = run_solver(spec, self.q, 3, "steps", 200)
        direct = solve_qubo(
            self.q,
            3,
            max_steps=200,
            schedule=LinearSchedule(t0=30, delta=2, refresh_every=5),
            refractory=RefractoryPolicy(0, 0),
        )
        assert via_spec == direct

    def test_alpha_accepts_fraction_text(self):
        spec = {"name": "nebm", "schedule": "geometric", "alpha": "9/10"}
        via_spec = run_solver(spec, self.q, 1, "steps", 100)
        from fractions import Fraction

        direct = solve_qubo(
            self.q,
            1,
            max_steps=100,
            schedule=GeometricSchedule(alpha=Fraction(9, 10)),
        )
        assert via_spec == direct

    def test_seconds_budget(self):
        res = run_solver({"name": "tabu"}, self.q, 0, "seconds", 0.02)
        assert res.steps > 0


class TestRecordFiles:
    def test_round_trip_and_reverification(self, tmp_path):
        records = run_plan(small_plan())
        out = tmp_path / "results.csv"
        save_records(out, records)
        assert out.read_text().splitlines()[0] == RESULTS_HEADER
        loaded = load_records(out)
        assert len(loaded) == len(records)
        for rec, row in zip(records, loaded):
            assert row["solver"] == rec.solver
            assert row["best_cost"] == rec.best_cost
            assert row["gap_percent"] == pytest.approx(rec.gap_percent, abs=1e-6)
        q = mis_to_qubo(generate_mis_graph(10, 0.3, 0))
        stored = load_assignments(str(out) + ".assignments")
        for i, row in enumerate(loaded):
            assert evaluate_cost(q, stored[i]) == row["best_cost"]

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("a,b\n")
        with pytest.raises(ValueError, match="header"):
            load_records(path)


class TestSummarize:
    def test_single_record_group(self):
        records = run_plan(small_plan(solvers=({"name": "tabu"},), repetitions=1))
        summary = summarize(records)
        assert len(summary) == 1
        g = summary[0]
        assert g["runs"] == 1
        assert g["gap_mean"] == g["gap_min"] == g["gap_max"]

    def test_known_mean(self):
        rows = [
            {
                "solver": "sa",
                "instance_n": 10,
                "density": 0.3,
                "budget_kind": "steps",
                "budget": 100,
                "gap_percent": gp,
                "steps": 100,
                "wall_ms": 1.0,
            }
            for gp in (0.0, 50.0, 100.0)
        ]
        summary = summarize(rows)
        assert summary[0]["gap_mean"] == 50.0
        assert summary[0]["gap_min"] == 0.0
        assert summary[0]["gap_max"] == 100.0

    def test_permutation_invariant(self):
        records = run_plan(small_plan())
        shuffled = list(records)
        np.random.default_rng(0).shuffle(shuffled)
        assert summarize(records) == summarize(shuffled)

    def test_save_summary(self, tmp_path):
        records = run_plan(small_plan(repetitions=2))
        path = tmp_path / "summary.csv"
        save_summary(path, summarize(records))
        lines = path.read_text().splitlines()
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 1 + 2  # two solvers, one group each
