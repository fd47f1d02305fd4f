"""Command line entry point.

Exit codes: 0 success, 1 malformed input or model violation, 2 invariant
failure.  ``RECOLORLAB_WORKERS`` sets the process count for ``bench``.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .. import adversaries as adv
from ..core import CapacityViolation, Instance, RecolorError
from ..delta import DegreeViolation
from ..oracles import (
    delta_opt_upper,
    min_vertex_cover,
    opt_2recoloring,
    opt_fully_dynamic_bruteforce,
)
from . import acceptance
from .runner import ALGORITHMS, bounds, csv_text, make_algorithm, run_requests, run_trace, trial_seed
from .trace import Trace, TraceError, read, write

OK, INPUT_ERROR, INVARIANT_FAILURE = 0, 1, 2
VARIANTS = ("odd-cycle", "batch", "batch-rand", "delta-set")
ORACLES = ("opt2", "fd-brute", "minvc", "equitable")
WORKERS_ENV = "RECOLORLAB_WORKERS"


class AuditFailure(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    trace = read(args.trace)
    result, _ = run_trace(args.alg, trace, seed=args.seed, eps=args.eps, timing=not args.no_timing)
    _emit(csv_text([result]), args.out)
    return OK


def _adversary_instance(variant: str, n: int, eps: Fraction, delta: int, rng: random.Random):
    if variant == "odd-cycle":
        gen = adv.OddCycleAdversary(n)
        return gen, Instance.unit(gen.initial_coloring(), 2, eps), "fully_dynamic2"
    if variant in ("batch", "batch-rand"):
        gen = adv.BatchAdversary(n, randomized=variant == "batch-rand", rng=random.Random(rng.random()))
        c0 = adv.balanced_split([1] * gen.n, rng)
        return gen, Instance.unit(c0, 2, eps), "online2"
    inst = adv.delta_instance(n, delta, eps, rng)
    return None, inst, "delta"


def cmd_adversary(args) -> int:
    eps = Fraction(args.eps)
    rng = random.Random(args.seed)
    gen, inst, model = _adversary_instance(args.variant, args.n, eps, args.delta, rng)
    if (model == "delta") != args.alg.startswith("delta"):
        raise ValueError(f"algorithm {args.alg} does not fit the {args.variant} adversary")
    alg = make_algorithm(args.alg, inst, args.seed)
    if gen is None:
        gen = adv.DeltaSetAdversary(inst.n, inst.k, alg.max_degree)
    family = adv.OfflineCycleFamily(inst.n, inst.c0) if args.variant == "odd-cycle" else None
    limit = args.limit
    if limit is None:
        limit = gen.ell**2 if args.variant == "odd-cycle" else 10**9
    reqs, reports = adv.play(gen, alg, lambda a: a.state.c, limit,
                             on_request=family.serve if family else None)
    if args.trace_out:
        write(Trace(model, inst, reqs), args.trace_out)
    lb, ub = bounds(args.alg, inst, reqs, alg.ledger)
    mono = sum(1 for r in reports if r.mono_at_arrival)
    summary = {
        "variant": args.variant,
        "alg": args.alg,
        "n": inst.n,
        "requests": len(reqs),
        "mono_at_arrival": mono,
        "cost": alg.ledger.total_cost,
        "lb": lb,
        "ub": ub,
        "phases": alg.ledger.phase_count,
    }
    if family is not None:
        summary["offline_best"] = family.best
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        result, _ = run_requests(args.alg, inst, reqs, args.seed, timing=not args.no_timing)
        Path(args.out).write_text(csv_text([result]))
    if args.variant == "odd-cycle" and mono != len(reqs):
        raise AuditFailure(f"{len(reqs) - mono} odd-cycle requests arrived properly colored")
    return OK


def cmd_oracle(args) -> int:
    trace = read(args.trace)
    inst, reqs = trace.instance, trace.requests
    if args.which == "opt2":
        value = opt_2recoloring(inst, reqs).opt_value
    elif args.which == "fd-brute":
        value = opt_fully_dynamic_bruteforce(inst, reqs).opt_value
    elif args.which == "minvc":
        value, _ = min_vertex_cover([(r.u, r.v) for r in reqs])
    else:
        value = delta_opt_upper(inst, reqs).opt_value
    print(value)
    return OK


def cmd_verify(args) -> int:
    only = set(args.only) if args.only else None
    if args.suite == "invariants" and only is None:
        only = {1, 2, 6, 7}
    results = acceptance.run_all(quick=args.quick, only=only)
    for r in results:
        print(r.line(), flush=True)
    return OK if all(r.ok for r in results) else INVARIANT_FAILURE


def _bench_cell(cell) -> str:
    alg, n, eps, seed, trial, m_factor, delta, timing = cell
    rng = random.Random(trial_seed(seed, trial))
    eps = Fraction(eps)
    if alg == "greedy2":
        inst = Instance.unit(adv.balanced_split([1] * n, rng), 2, eps)
        reqs = adv.random_sequence(n, adv.ARBITRARY, rng, m=m_factor * n).requests
    elif alg == "follow":
        inst, hidden = adv.online_instance(n, eps, rng)
        reqs = adv.random_sequence(n, adv.BIPARTITE_SAFE, rng, m=m_factor * n, hidden=hidden).requests
    else:
        inst = adv.delta_instance(n, delta, eps, rng)
        max_degree = int((1 - eps) * delta)
        reqs = adv.random_sequence(n, adv.DELTA_SAFE, rng, m=m_factor * n, max_degree=max_degree).requests
    result, _ = run_requests(alg, inst, reqs, seed=trial_seed(seed, trial) % 2**31, timing=timing)
    result.seed = seed
    return csv_text([result]).split("\n", 1)[1]


def cmd_bench(args) -> int:
    matrix = json.loads(Path(args.matrix).read_text())
    algs = matrix.get("algs", ["greedy2"])
    for a in algs:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    cells = [
        (a, int(n), str(e), int(s), t, int(matrix.get("m_factor", 2)), int(matrix.get("delta", 8)), not args.no_timing)
        for a in algs
        for n in matrix.get("n", [64])
        for e in matrix.get("eps", ["1/2"])
        for s in matrix.get("seeds", [0])
        for t in range(int(matrix.get("trials", 1)))
    ]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(c) for c in cells]
    header = csv_text([])
    _emit(header + "".join(rows), args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recolorlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an algorithm over a trace file")
    run.add_argument("--alg", choices=ALGORITHMS, required=True)
    run.add_argument("--trace", required=True)
    run.add_argument("--eps", default=None, help="override the trace's eps (rational, e.g. 1/4)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None, help="CSV destination (default stdout)")
    run.add_argument("--no-timing", action="store_true", help="write 0 in the ms column")
    run.set_defaults(func=cmd_run)

    a = sub.add_parser("adversary", help="play an adaptive adversary against an algorithm")
    a.add_argument("--variant", choices=VARIANTS, required=True)
    a.add_argument("--alg", choices=ALGORITHMS, required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--eps", default="1/2")
    a.add_argument("--delta", type=int, default=8, help="colors for delta-set")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--limit", type=int, default=None)
    a.add_argument("--trace-out", default=None)
    a.add_argument("--out", default=None)
    a.add_argument("--no-timing", action="store_true")
    a.set_defaults(func=cmd_adversary)

    o = sub.add_parser("oracle", help="evaluate an offline oracle on a trace")
    o.add_argument("--trace", required=True)
    o.add_argument("--which", choices=ORACLES, required=True)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run the invariant or acceptance suite")
    v.add_argument("--suite", choices=("invariants", "acceptance"), required=True)
    v.add_argument("--quick", action="store_true")
    v.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run an (alg, n, eps, seed) grid to CSV")
    b.add_argument("--matrix", required=True, help="JSON file with algs, n, eps, seeds, trials")
    b.add_argument("--out", default=None)
    b.add_argument("--no-timing", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CapacityViolation, AuditFailure, RuntimeError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return INVARIANT_FAILURE
    except (TraceError, DegreeViolation, RecolorError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
