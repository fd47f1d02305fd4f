import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from recolorlab.adversaries import BIPARTITE_SAFE, online_instance, random_sequence
from recolorlab.core import Instance, Request
from recolorlab.harness import cli
from recolorlab.harness.runner import (
    COLUMNS,
    csv_text,
    format_ratio,
    make_algorithm,
    replay_cost,
    run_requests,
    trial_seed,
)
from recolorlab.harness.trace import Trace, TraceError, dumps, loads, read, write

HEADER = '{"B":3,"c0":[1,2,1,2,1,2],"eps":"1/2","k":2,"model":"fully_dynamic2","n":6,"w":[1,1,1,1,1,1]}'


def sample_trace(seed=0, n=20):
    rnd = random.Random(seed)
    inst, hidden = online_instance(n, Fraction(1, 3), rnd, max_weight=4)
    reqs = random_sequence(n, BIPARTITE_SAFE, rnd, m=3 * n, hidden=hidden).requests
    return Trace("online2", inst, reqs)


def test_round_trip_is_byte_identical():
    for seed in range(20):
        text = dumps(sample_trace(seed))
        assert dumps(loads(text)) == text
        assert loads(text).requests == sample_trace(seed).requests


def test_file_round_trip(tmp_path):
    p = tmp_path / "t.trace"
    write(sample_trace(3), p)
    assert dumps(read(p)) == p.read_text()


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("not json\n", 1),
        ('{"model":"online2"}\n', 1),
        (HEADER.replace('"w":[1,1,1,1,1,1]', '"w":[1,1,1,1,1,2]') + "\n", 1),
        (HEADER.replace("fully_dynamic2", "delta") + "\n", 1),
        (HEADER + "\n0 1\n2 2\n", 3),
        (HEADER + "\n0 1\n0 9\n", 3),
        (HEADER + "\n0 1\n0,1\n", 3),
        (HEADER + "\n0\n", 2),
    ],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(TraceError) as err:
        loads(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_empty_trace_runs_at_zero_cost():
    t = loads(HEADER + "\n")
    res, _ = run_requests("greedy2", Instance.unit((1, 2) * 8, 2, Fraction(1, 2)), t.requests, timing=False)
    assert res.cost == 0 and res.ratio == "1.000000"


def test_ratio_denominator():
    assert format_ratio(0, 0) == "1.000000"
    assert format_ratio(6, 0) == "6.000000"
    assert format_ratio(6, 4) == "1.500000"


def test_csv_columns_are_fixed():
    t = sample_trace(1)
    res, _ = run_requests("follow", t.instance, t.requests, timing=False)
    head, row, _ = csv_text([res]).split("\n")
    assert head.split(",") == list(COLUMNS)
    assert row.split(",")[0] == "follow"


@pytest.mark.parametrize("alg", ["greedy2", "follow"])
def test_replayer_reproduces_ledger(alg):
    for seed in range(10):
        t = sample_trace(seed, n=40)
        res, a = run_requests(alg, t.instance, t.requests, timing=False, log=True)
        assert replay_cost(t.instance, a.ledger.log, a.state.c) == a.ledger.total_cost == res.cost


def test_replayer_rejects_inconsistent_log():
    inst = Instance.unit((1, 2), 2, Fraction(1, 2))
    with pytest.raises(AssertionError):
        replay_cost(inst, [(1, 0, 2, 1, 1)])
    with pytest.raises(AssertionError):
        replay_cost(inst, [(1, 0, 1, 2, 1)], final_coloring=[1, 2])


def test_trial_seeds_are_stable_and_distinct():
    assert trial_seed(1, 0) == trial_seed(1, 0)
    assert len({trial_seed(s, t) for s in range(10) for t in range(10)}) == 100


def test_algorithm_model_mismatch():
    with pytest.raises(ValueError):
        make_algorithm("delta-det", Instance.unit((1, 2), 2, Fraction(1, 2)))
    with pytest.raises(ValueError):
        make_algorithm("nope", Instance.unit((1, 2), 2, Fraction(1, 2)))


def test_cli_run_oracle_and_exit_codes(tmp_path, capsys):
    tri = tmp_path / "tri.trace"
    tri.write_text(HEADER + "\n0 1\n1 2\n2 0\n")
    assert cli.main(["oracle", "--trace", str(tri), "--which", "minvc"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert cli.main(["oracle", "--trace", str(tri), "--which", "fd-brute"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    # eps >= 8/n needs more vertices than the triangle trace carries
    big = tmp_path / "big.trace"
    write(Trace("fully_dynamic2", Instance.unit((1, 2) * 8, 2, Fraction(1, 2)), [Request(0, 1), Request(1, 2), Request(2, 0)]), big)
    assert cli.main(["run", "--alg", "greedy2", "--trace", str(tri)]) == 1
    assert "8/n" in capsys.readouterr().err
    out = tmp_path / "r.csv"
    assert cli.main(["run", "--alg", "greedy2", "--trace", str(big), "--out", str(out), "--no-timing"]) == 0
    assert out.read_text().startswith(",".join(COLUMNS))
    # odd triangle is outside the online model
    assert cli.main(["run", "--alg", "follow", "--trace", str(tri)]) == 1
    bad = tmp_path / "bad.trace"
    bad.write_text(HEADER + "\n1 1\n")
    assert cli.main(["run", "--alg", "greedy2", "--trace", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["run", "--alg", "greedy2", "--trace", str(tmp_path / "missing")]) == 1


def test_cli_adversary_odd_cycle_audit(tmp_path, capsys):
    trace = tmp_path / "oc.trace"
    assert cli.main(["adversary", "--variant", "odd-cycle", "--alg", "greedy2", "--n", "16", "--trace-out", str(trace)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["requests"] == summary["mono_at_arrival"] == 49
    assert summary["cost"] >= summary["requests"]
    assert len(read(trace).requests) == 49
    assert cli.main(["adversary", "--variant", "delta-set", "--alg", "greedy2", "--n", "40"]) == 1


def test_cli_bench_is_deterministic_across_worker_counts(tmp_path, monkeypatch):
    matrix = tmp_path / "m.json"
    matrix.write_text(json.dumps({"algs": ["greedy2", "follow", "delta-rand"], "n": [40], "eps": ["1/2"], "seeds": [1, 2], "trials": 2, "delta": 4}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv(cli.WORKERS_ENV, "1")
    assert cli.main(["bench", "--matrix", str(matrix), "--out", str(a), "--no-timing"]) == 0
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert cli.main(["bench", "--matrix", str(matrix), "--out", str(b), "--no-timing"]) == 0
    assert a.read_text() == b.read_text()
    assert len(a.read_text().splitlines()) == 1 + 3 * 2 * 2


def test_cli_verify_quick_subset(capsys):
    assert cli.main(["verify", "--suite", "acceptance", "--quick", "--only", "1", "7"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2 and all(l.startswith("[PASS]") for l in lines)


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "recolorlab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "adversary" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "recolorlab", "run"], capture_output=True, text=True)
    assert proc.returncode == 2  # argparse usage error
