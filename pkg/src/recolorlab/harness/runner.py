"""Algorithm dispatch, oracle bounds, result rows and seeded trial streams."""

from __future__ import annotations

import csv
import hashlib
import io
import random
import time
from dataclasses import dataclass, fields
from fractions import Fraction

from .. import delta as delta_mod
from ..core import CostLedger, Instance, RecolorError
from ..follow_greedy import FollowGreedy
from ..fully_dynamic import GreedyRecoloring
from ..oracles import (
    ScaleExceeded,
    delta_opt_upper,
    min_vertex_cover,
    monochromatic_edges,
    opt_2recoloring,
    phase_lower_bound,
)
from .trace import Trace

ALGORITHMS = ("greedy2", "follow", "delta-det", "delta-rand")
COLUMNS = ("alg", "n", "eps", "seed", "cost", "lb", "ub", "ratio", "phases", "rebalances", "ms")


def trial_seed(seed: int, trial: int) -> int:
    """Independent 64-bit stream seed for trial ``trial`` of master ``seed``."""
    digest = hashlib.sha256(f"{seed}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_algorithm(name: str, instance: Instance, seed: int = 0, log: bool = False):
    if name.startswith("delta") == (instance.k == 2):
        raise ValueError(f"algorithm {name} does not fit an instance with {instance.k} colors")
    ledger = CostLedger(log=[] if log else None)
    if name == "greedy2":
        return GreedyRecoloring(instance, ledger=ledger)
    if name == "follow":
        return FollowGreedy(instance, ledger=ledger)
    if name == "delta-det":
        return delta_mod.DeltaRecoloring(instance, delta_mod.DETERMINISTIC, random.Random(seed), ledger)
    if name == "delta-rand":
        return delta_mod.DeltaRecoloring(instance, delta_mod.RANDOMIZED, random.Random(seed), ledger)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


def with_eps(instance: Instance, eps) -> Instance:
    if eps is None:
        return instance
    return Instance(instance.n, instance.k, instance.w, instance.c0, instance.B, Fraction(str(eps)))


def format_ratio(cost: int, lb: int) -> str:
    if cost == 0 and lb == 0:
        return "1.000000"
    return f"{cost / max(lb, 1):.6f}"


@dataclass
class RunResult:
    alg: str
    n: int
    eps: str
    seed: int
    cost: int
    lb: int
    ub: str
    ratio: str
    phases: int
    rebalances: int
    ms: int

    def row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


def bounds(alg_name: str, instance: Instance, requests, ledger: CostLedger) -> tuple[int, str]:
    """Oracle lower bound and (when available) upper bound for a finished run."""
    if alg_name == "greedy2":
        return phase_lower_bound(ledger), ""
    if alg_name == "follow":
        opt = opt_2recoloring(instance, requests).opt_value
        return opt, str(opt)
    gm = monochromatic_edges(instance.c0, requests)
    try:
        lb, _ = min_vertex_cover(gm)
    except ScaleExceeded:
        lb = 0
    try:
        ub = str(delta_opt_upper(instance, requests).opt_value)
    except (ValueError, RecolorError):
        ub = ""
    return lb, ub


def run_requests(alg_name: str, instance: Instance, requests, seed: int = 0, timing: bool = True,
                 log: bool = False):
    """Run one algorithm over a request list; returns (RunResult, algorithm)."""
    start = time.perf_counter()
    alg = make_algorithm(alg_name, instance, seed, log=log)
    for r in requests:
        alg.process_request(r)
    ms = int((time.perf_counter() - start) * 1000) if timing else 0
    ledger = alg.ledger
    lb, ub = bounds(alg_name, instance, requests, ledger)
    result = RunResult(
        alg=alg_name,
        n=instance.n,
        eps=str(instance.eps),
        seed=seed,
        cost=ledger.total_cost,
        lb=lb,
        ub=ub,
        ratio=format_ratio(ledger.total_cost, lb),
        phases=ledger.phase_count,
        rebalances=ledger.rebalance_calls,
        ms=ms,
    )
    return result, alg


def run_trace(alg_name: str, trace: Trace, seed: int = 0, eps=None, timing: bool = True, log: bool = False):
    return run_requests(alg_name, with_eps(trace.instance, eps), trace.requests, seed, timing, log)


def csv_text(results) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(COLUMNS)
    for r in results:
        out.writerow(r.row())
    return buf.getvalue()


def replay_cost(instance: Instance, log, final_coloring=None) -> int:
    """Re-derive the total cost from a recoloring log, independent of the ledger.

    Each entry ``(t, v, old, new, w)`` must start from ``v``'s current color and
    actually change it; the charge is the instance weight of ``v``.
    """
    col = list(instance.c0)
    total = 0
    for t, v, old, new, _w in log:
        if col[v] != old:
            raise AssertionError(f"log entry at t={t}: vertex {v} has color {col[v]}, log says {old}")
        if old == new:
            raise AssertionError(f"log entry at t={t} does not change the color of {v}")
        col[v] = new
        total += instance.w[v]
    if final_coloring is not None and list(final_coloring) != col:
        raise AssertionError("replayed coloring differs from the algorithm's final coloring")
    return total


__all__ = [
    "ALGORITHMS",
    "COLUMNS",
    "RunResult",
    "bounds",
    "csv_text",
    "format_ratio",
    "make_algorithm",
    "replay_cost",
    "run_requests",
    "run_trace",
    "trial_seed",
    "with_eps",
]
