"""End-to-end runs of the command-line interface, in process via main()."""

import json

import numpy as np
import pytest

from nebm import (
    MisGraph,
    build_qubo,
    evaluate_cost,
    generate_mis_graph,
    load_bks,
    load_qubo,
    mis_bks_cost,
    save_graph,
    save_qubo,
    tabu_search,
)
from nebm.bench import RESULTS_HEADER
from nebm.cli import main


def read_bits(path):
    return np.array([int(c) for c in path.read_text().strip()], dtype=np.uint8)


class TestGenerate:
    def test_writes_graph_and_qubo(self, tmp_path, capsys):
        out = tmp_path / "inst"
        rc = main(
            ["generate", "--n", "12", "--density", "0.5", "--seed", "3",
             "--out", str(out)]
        )
        assert rc == 0
        line = capsys.readouterr().out.strip()
        g = generate_mis_graph(12, 0.5, 3)
        assert line == (
            f"wrote {out}.graph (n=12 edges={g.m}) and "
            f"{out}.qubo (nnz={12 + g.m})"
        )
        q = load_qubo(f"{out}.qubo")
        assert q.n == 12

    def test_density_zero_has_no_edges(self, tmp_path, capsys):
        out = tmp_path / "empty"
        assert main(["generate", "--n", "6", "--density", "0", "--out", str(out)]) == 0
        assert "edges=0" in capsys.readouterr().out
        assert "e " not in (tmp_path / "empty.graph").read_text()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["generate", "--n", "15", "--density", "0.3", "--seed", "9",
                  "--out", str(out)])
        assert (tmp_path / "a.graph").read_bytes() == (tmp_path / "b.graph").read_bytes()
        assert (tmp_path / "a.qubo").read_bytes() == (tmp_path / "b.qubo").read_bytes()

    def test_missing_required_args(self, tmp_path, capsys):
        assert main(["generate", "--n", "6", "--out", str(tmp_path / "x")]) == 2
        assert "density" in capsys.readouterr().err


@pytest.fixture
def one_var_qubo(tmp_path):
    path = tmp_path / "one.qubo"
    save_qubo(build_qubo(1, [(0, 0, -1)]), path)
    return path


@pytest.fixture
def diag_qubo(tmp_path):
    # Unique optimum 1010 with cost -5.
    path = tmp_path / "diag.qubo"
    save_qubo(build_qubo(4, [(0, 0, -3), (1, 1, 5), (2, 2, -2), (3, 3, 7)]), path)
    return path


class TestSolve:
    def test_single_variable(self, one_var_qubo, capsys):
        assert main(["solve", str(one_var_qubo), "--max-steps", "10"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("best_cost=-1 steps=10 wall_ms=")

    def test_finds_diagonal_optimum(self, diag_qubo, tmp_path, capsys):
        bits_path = tmp_path / "bits.txt"
        rc = main(
            ["solve", str(diag_qubo), "--max-steps", "200", "--out", str(bits_path)]
        )
        assert rc == 0
        assert "best_cost=-5 " in capsys.readouterr().out
        assert bits_path.read_text() == "1010\n"

    def test_deterministic_reruns(self, diag_qubo, tmp_path, capsys):
        outs = []
        for name in ("r1", "r2"):
            path = tmp_path / name
            main(["solve", str(diag_qubo), "--seed", "7", "--max-steps", "120",
                  "--out", str(path)])
            head = capsys.readouterr().out.rsplit("wall_ms=", 1)[0]
            outs.append((head, path.read_bytes()))
        assert outs[0] == outs[1]

    def test_each_solver_runs(self, diag_qubo, capsys):
        for solver in ("nebm", "sa", "tabu"):
            rc = main(["solve", str(diag_qubo), "--solver", solver,
                       "--max-steps", "60"])
            assert rc == 0
            assert "best_cost=-5 " in capsys.readouterr().out

    def test_tabu_restart_flag_zero_disables(self, tmp_path, capsys):
        out = tmp_path / "g"
        main(["generate", "--n", "20", "--density", "0.3", "--out", str(out)])
        capsys.readouterr()
        rc = main(["solve", f"{out}.qubo", "--solver", "tabu",
                   "--max-steps", "50", "--restart-after", "0"])
        assert rc == 0
        cost = int(capsys.readouterr().out.split()[0].split("=")[1])
        q = load_qubo(f"{out}.qubo")
        direct = tabu_search(q, 0, sweeps=50, restart_after=None)
        assert cost == direct.best_cost

    def test_budget_flags_are_exclusive(self, one_var_qubo, capsys):
        rc = main(["solve", str(one_var_qubo), "--max-steps", "5",
                   "--max-seconds", "0.1"])
        assert rc == 2
        assert "mutually exclusive" in capsys.readouterr().err

    def test_seconds_budget(self, diag_qubo, capsys):
        assert main(["solve", str(diag_qubo), "--max-seconds", "0.05"]) == 0
        assert "best_cost=-5 " in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "ghost.qubo")]) == 2


class TestTrace:
    def test_trace_file_format(self, diag_qubo, tmp_path, capsys):
        trace = tmp_path / "trace.txt"
        rc = main(["trace", str(diag_qubo), "--max-steps", "60",
                   "--trace-out", str(trace)])
        assert rc == 0
        summary = capsys.readouterr().out
        assert "steps=60" in summary
        lines = trace.read_text().splitlines()
        assert len(lines) == 60
        for i, line in enumerate(lines):
            step, flips, cost, t_hat = (int(tok) for tok in line.split())
            assert step == i + 1
            assert flips >= 0
            assert t_hat >= 0

    def test_trace_to_stdout(self, diag_qubo, capsys):
        assert main(["trace", str(diag_qubo), "--max-steps", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        # 5 trace lines then the summary line.
        assert len(lines) == 6
        assert lines[-1].startswith("best_cost=")
        assert [int(l.split()[0]) for l in lines[:5]] == [1, 2, 3, 4, 5]

    def test_trace_rejects_sequential_solvers(self, diag_qubo, capsys):
        rc = main(["trace", str(diag_qubo), "--solver", "sa", "--max-steps", "5"])
        assert rc == 2
        assert "trace" in capsys.readouterr().err


class TestBks:
    def test_exact_cache_for_small_instance(self, tmp_path, capsys):
        cache_path = tmp_path / "bks.csv"
        rc = main(["bks", "--nodes", "5", "--densities", "0.5", "--seeds", "0",
                   "--cache", str(cache_path)])
        assert rc == 0
        assert capsys.readouterr().out.strip() == (
            f"bks cache {cache_path}: 1 computed, 1 total"
        )
        cache = load_bks(cache_path)
        cost, prov = cache[(5, "0.5", 0)]
        assert prov == "exact"
        assert cost == mis_bks_cost(generate_mis_graph(5, 0.5, 0))

    def test_second_run_adds_nothing(self, tmp_path, capsys):
        cache_path = tmp_path / "bks.csv"
        args = ["bks", "--nodes", "5,8", "--densities", "0.5", "--seeds", "0",
                "--cache", str(cache_path)]
        main(args)
        capsys.readouterr()
        assert main(args) == 0
        assert "0 computed, 2 total" in capsys.readouterr().out

    def test_requires_cache_path(self, capsys):
        assert main(["bks", "--nodes", "5"]) == 2
        assert "cache" in capsys.readouterr().err


def write_plan(path, **fields):
    base = dict(
        nodes=[10],
        densities=[0.3],
        instance_seeds=[0],
        solvers=[{"name": "tabu"}],
        budgets=[40],
        repetitions=2,
    )
    base.update(fields)
    path.write_text(json.dumps(base))
    return path


class TestBench:
    def test_empty_plan_writes_header_only(self, tmp_path, capsys):
        plan = write_plan(tmp_path / "plan.json", instance_seeds=[])
        out = tmp_path / "results.csv"
        rc = main(["bench", "--plan", str(plan), "--out", str(out)])
        assert rc == 0
        assert "wrote 0 records" in capsys.readouterr().out
        assert out.read_text() == RESULTS_HEADER + "\n"

    def test_small_plan_end_to_end(self, tmp_path, capsys):
        plan = write_plan(tmp_path / "plan.json")
        out = tmp_path / "results.csv"
        bks = tmp_path / "bks.csv"
        summary = tmp_path / "summary.csv"
        rc = main(["bench", "--plan", str(plan), "--out", str(out),
                   "--bks", str(bks), "--summary", str(summary)])
        assert rc == 0
        assert "wrote 2 records" in capsys.readouterr().out
        assert len(out.read_text().splitlines()) == 3
        assert summary.exists()
        # The inline exact value was persisted for reuse.
        assert load_bks(bks)[(10, "0.3", 0)][1] == "exact"

    def test_rerun_reproduces_gap_columns(self, tmp_path, capsys):
        plan = write_plan(tmp_path / "plan.json")

        def run(name):
            out = tmp_path / name
            main(["bench", "--plan", str(plan), "--out", str(out)])
            capsys.readouterr()
            rows = out.read_text().splitlines()[1:]
            return [r.rsplit(",", 1)[0] for r in rows]

        assert run("a.csv") == run("b.csv")

    def test_missing_bks_is_exit_3(self, tmp_path, capsys):
        plan = write_plan(tmp_path / "plan.json", nodes=[50])
        rc = main(["bench", "--plan", str(plan), "--out", str(tmp_path / "r.csv")])
        assert rc == 3
        assert "bks subcommand" in capsys.readouterr().err


class TestOracle:
    def test_five_cycle(self, tmp_path, capsys):
        path = tmp_path / "c5.graph"
        save_graph(MisGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]), path)
        assert main(["oracle", str(path)]) == 0
        out = capsys.readouterr().out.strip()
        assert out.startswith("mis_size=2 cost=-2 bits=")
        bits = out.split("bits=")[1]
        assert len(bits) == 5
        assert bits.count("1") == 2


class TestConfigAndExitCodes:
    def test_config_supplies_defaults(self, diag_qubo, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"max_steps": 37, "seed": 2}))
        assert main(["solve", str(diag_qubo), "--config", str(cfg)]) == 0
        assert "steps=37 " in capsys.readouterr().out

    def test_flag_overrides_config(self, diag_qubo, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"max_steps": 37}))
        rc = main(["solve", str(diag_qubo), "--config", str(cfg),
                   "--max-steps", "21"])
        assert rc == 0
        assert "steps=21 " in capsys.readouterr().out

    def test_config_solver_params_flow_through(self, diag_qubo, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"solver": "tabu", "tenure": 3, "max_steps": 30}))
        assert main(["solve", str(diag_qubo), "--config", str(cfg)]) == 0
        assert "best_cost=-5 " in capsys.readouterr().out

    def test_non_object_config(self, diag_qubo, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        assert main(["solve", str(diag_qubo), "--config", str(cfg)]) == 2
        assert "JSON object" in capsys.readouterr().err

    def test_missing_config_file(self, diag_qubo, tmp_path, capsys):
        rc = main(["solve", str(diag_qubo), "--config", str(tmp_path / "no.json")])
        assert rc == 2

    def test_parse_errors(self, capsys):
        assert main(["frobnicate"]) == 2
        assert main(["solve"]) == 2
        assert main(["solve", "x.qubo", "--solver", "gurobi"]) == 2
        capsys.readouterr()

    def test_corrupt_qubo_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.qubo"
        bad.write_text("qubo x y\n")
        assert main(["solve", str(bad)]) == 2
