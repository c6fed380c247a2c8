import csv
import dataclasses
import os

import numpy as np
import pytest

from udmec import cli
from udmec import harness as hz
from udmec.scenario import generate_scenario, load
from udmec.sysmodel import evaluate

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "results_tiny.csv")

TINY_SPEC = hz.ExperimentSpec(
    algorithms=("clca", "coa", "fihas"),
    seeds=(0, 1),
    scenario=dict(N=3, K=2, M=1, Q=1, W=2e6, w=2e6, region_side_m=150.0),
    solver=dict(I=4, T1=6, T2=4),
)


def test_single_clca_row():
    res = hz.run_experiment(hz.ExperimentSpec(algorithms=("clca",), seeds=(0,)))
    assert len(res) == 1
    assert res[0].tsr == 1.0 and res[0].csr == 1.0


def test_row_count_and_order():
    spec = dataclasses.replace(TINY_SPEC, algorithms=("coa", "clca"), sweep_param="K", sweep_values=(3, 1, 2))
    res = hz.run_experiment(spec)
    assert len(res) == 12
    keys = [(r.sweep_value, r.seed, r.algo) for r in res]
    assert keys == sorted(keys)


def test_invalid_specs():
    with pytest.raises(hz.UsageError):
        hz.run_experiment(hz.ExperimentSpec(algorithms=("bogus",)))
    with pytest.raises(hz.UsageError):
        hz.run_experiment(hz.ExperimentSpec(seeds=()))
    with pytest.raises(hz.UsageError):
        hz.run_experiment(hz.ExperimentSpec(sweep_param="W", sweep_values=(1,)))


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        hz.run_experiment(dataclasses.replace(TINY_SPEC, algorithms=("clca",), out_dir=str(blocker / "sub")))


def test_results_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    hz.run_experiment(dataclasses.replace(TINY_SPEC, out_dir=str(a)))
    hz.run_experiment(dataclasses.replace(TINY_SPEC, out_dir=str(b)))
    names = sorted(n for n in os.listdir(a) if n.endswith(".csv"))
    assert "results.csv" in names and "trace_fihas_0.csv" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_parallel_rows_match_serial(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    hz.run_experiment(dataclasses.replace(TINY_SPEC, out_dir=str(a)))
    hz.run_experiment(dataclasses.replace(TINY_SPEC, out_dir=str(b), workers=2))
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()


def test_golden_results(tmp_path):
    hz.run_experiment(dataclasses.replace(TINY_SPEC, out_dir=str(tmp_path)))
    got = (tmp_path / "results.csv").read_text()
    with open(GOLDEN) as fh:
        assert got == fh.read()
    assert got.splitlines()[0].split(",") == list(hz.RESULT_COLUMNS)


def test_metrics_match_independent_evaluation():
    spec = dataclasses.replace(TINY_SPEC, seeds=(3,))
    for r in hz.run_experiment(spec):
        sc = generate_scenario(spec.base_scenario().replace(seed=3))
        from udmec.solvers import solve
        sol = solve(sc, r.algo, spec.base_solver(), seed=3)
        rep = evaluate(sc, sol.assignment)
        assert r.tec == rep.objective and r.td == rep.td
        assert r.tec >= 0 and 0 <= r.tsr <= 1 and 0 <= r.csr <= 1


def test_sweep_values_applied():
    spec = dataclasses.replace(TINY_SPEC, algorithms=("clca",), seeds=(0,))
    res = hz.sweep_local_capacity(spec, values=(1.0, 2.0))
    assert [r.sweep_value for r in res] == [1.0, 2.0]
    s, _ = hz.apply_sweep("f_lmax", 1.5, spec.base_scenario(), spec.base_solver())
    assert s.f_lmax_range == (1.5e9, 1.5e9)
    _, c = hz.apply_sweep("mu3", 0.7, spec.base_scenario(), spec.base_solver())
    assert c.mu3 == 0.7


def test_convergence_trace_files(tmp_path):
    spec = dataclasses.replace(TINY_SPEC, seeds=(0,), out_dir=str(tmp_path))
    res = hz.convergence_trace(spec)
    assert {r.algo for r in res} == {"fihas", "ihas"}
    with open(tmp_path / "convergence_fihas_0.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "best_fitness", "phase"]
    assert len(rows) - 1 == 10
    assert rows[6][2] == "ga" and rows[7][2] == "pso"


def test_oracle_gap_definition():
    assert hz.optimality_gap(-1.0, -1.0) == 0.0
    assert hz.optimality_gap(-1.1, -1.0) == pytest.approx(0.1)
    rows = hz.oracle_compare(seeds=(0,), algorithms=("clca",))
    assert [r.algo for r in rows] == ["exhaustive", "clca"]
    assert rows[0].gap == 0.0 and rows[1].gap >= 0


# -- CLI ---------------------------------------------------------------------

def _run(argv):
    return cli.main(argv)


def test_cli_generate_and_solve(tmp_path, capsys):
    assert _run(["generate", "--seed", "4", "--out", str(tmp_path)]) == 0
    sc = load(tmp_path / "scenario_4.json")
    assert sc.config.N == 10 and sc.config.seed == 4
    assert _run(["solve", "--algo", "clca", "--scenario", str(tmp_path / "scenario_4.json"), "--out", str(tmp_path)]) == 0
    assert "TSR=1.000" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    assert _run(["sweep", "--algo", "nope", "--out", str(tmp_path)]) != 0
    err = capsys.readouterr().err.strip()
    assert err.startswith("udmec: error:") and "\n" not in err
    assert _run(["solve", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) != 0
    bad = tmp_path / "bad.toml"
    bad.write_text("Q = 99\n")
    assert _run(["generate", "--config", str(bad), "--out", str(tmp_path)]) != 0
    assert "Q" in capsys.readouterr().err


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('N = 3\nK = 2\nM = 1\nQ = 1\nW = 2e6\n[solver]\nI = 4\nT1 = 3\nT2 = 2\n[experiment]\nalgorithms = ["clca", "fihas"]\nseeds = [5]\n')
    out = tmp_path / "o"
    assert _run(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    with open(out / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [(r["algo"], r["seed"]) for r in rows] == [("clca", "5"), ("fihas", "5")]
