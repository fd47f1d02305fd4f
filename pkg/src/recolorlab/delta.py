"""Delta-recoloring in the overprovisioned setting.

``n`` unit-weight vertices, ``Delta`` colors of capacity ``(1 + eps) n / Delta``
and a request graph whose degree never exceeds ``(1 - eps) Delta``.  Only
vertices in an online 2-approximate vertex cover of the initially
monochromatic edges are recolored.  The deterministic policy moves a vertex to
its emptiest feasible color and falls back to an equitable recoloring of the
whole graph; the randomized policy samples a feasible color and falls back to
a sequential random recoloring.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    ColoringState,
    CostLedger,
    Instance,
    InvalidInstance,
    RecolorError,
    Request,
    StepReport,
    recolor,
)

DETERMINISTIC = "deterministic"
RANDOMIZED = "randomized"


class DegreeViolation(RecolorError):
    pass


def equitable_coloring(adj, r: int, num_colors: int | None = None) -> list[int]:
    """Proper coloring with ``num_colors`` (default ``r + 1``) classes whose
    sizes differ by at most one.  Colors are 1-based.

    ``adj`` is a list of neighbor collections.  Requires max degree <= r and
    ``num_colors >= r + 1``.
    """
    n = len(adj)
    k = r + 1 if num_colors is None else num_colors
    maxdeg = max((len(a) for a in adj), default=0)
    if maxdeg > r or k < r + 1:
        raise DegreeViolation(f"max degree {maxdeg} needs more than {k} classes (r = {r})")
    if n == 0:
        return []
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from((u, v) for u in range(n) for v in adj[u] if u < v)
    if k == 1:
        return [1] * n
    col = nx.algorithms.coloring.equitable_color(G, k)
    return [col[v] + 1 for v in range(n)]


def best_relabel(new: list[int], old: list[int], k: int, classes: int | None = None) -> list[int]:
    """Map class labels of ``new`` injectively onto colors ``1..k`` so that it
    agrees with ``old`` on as many vertices as possible."""
    classes = k if classes is None else classes
    overlap = np.zeros((classes, k), dtype=np.int64)
    for a, b in zip(new, old):
        overlap[a - 1, b - 1] += 1
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    perm = {int(r) + 1: int(c) + 1 for r, c in zip(rows, cols)}
    return [perm[a] for a in new]


@dataclass
class DeltaStats:
    recolorings: int = 0
    rebalances: int = 0
    completed_phase_recolorings: list = field(default_factory=list)
    phase_recolorings: int = 0
    # requests with an endpoint whose color was chosen before
    eligible_requests: int = 0
    eligible_mono: int = 0
    max_load_seen: int = 0
    rebalance_max_loads: list = field(default_factory=list)


class DeltaRecoloring:
    """Generic dispatch over the two recolor/rebalance policies."""

    def __init__(self, instance: Instance, policy: str = DETERMINISTIC, rng: random.Random | None = None,
                 ledger: CostLedger | None = None):
        if policy not in (DETERMINISTIC, RANDOMIZED):
            raise ValueError(f"unknown policy {policy!r}")
        self.instance = instance
        self.n = instance.n
        self.delta = instance.k
        self.eps = instance.eps
        self.policy = policy
        self.rng = rng if rng is not None else random.Random(0)
        self.ledger = ledger if ledger is not None else CostLedger()
        self.capacity = math.floor((1 + self.eps) * instance.n / instance.k)
        self.max_degree = math.floor((1 - self.eps) * instance.k)
        if self.max_degree < 1:
            raise InvalidInstance("(1 - eps) * Delta must allow at least one edge per vertex")
        self.state = ColoringState(instance.w, instance.c0, instance.k, self.capacity)
        self.adj: list[set[int]] = [set() for _ in range(self.n)]
        self.cover: set[int] = set()
        # vertices added by the generic dispatch for edges outside G_M
        self.extra: set[int] = set()
        self.gm_edges: list[tuple[int, int]] = []
        self.chosen = [False] * self.n
        self.stats = DeltaStats(max_load_seen=max(self.state.load))

    # -- graph bookkeeping -------------------------------------------------

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def feasible(self, v: int) -> list[int]:
        used = {self.state.c[y] for y in self.adj[v]}
        return [i for i in range(1, self.delta + 1) if i not in used]

    def in_cover(self, v: int) -> bool:
        return v in self.cover or v in self.extra

    def update_vertex_cover(self, u: int, v: int) -> None:
        """Greedy 2-approximate cover of the initially monochromatic edges."""
        self.gm_edges.append((u, v))
        if u not in self.cover and v not in self.cover:
            self.cover.add(u)
            self.cover.add(v)

    # -- per-request dispatch ------------------------------------------------

    def process_request(self, req: Request):
        u, v = req.u, req.v
        self.ledger.t = req.t
        before = self.ledger.total_cost
        c = self.state.c
        if v in self.adj[u]:
            return StepReport(req.t, u, v, "repeat", 0, False, self.ledger.phase_count)
        if self.degree(u) >= self.max_degree or self.degree(v) >= self.max_degree:
            raise DegreeViolation(f"request ({u}, {v}) pushes a degree past {self.max_degree}")
        self.adj[u].add(v)
        self.adj[v].add(u)
        c0 = self.instance.c0
        if c0[u] == c0[v]:
            self.update_vertex_cover(u, v)
        mono = c[u] == c[v]
        if self.chosen[u] or self.chosen[v]:
            self.stats.eligible_requests += 1
            self.stats.eligible_mono += mono
        branch = "proper"
        if mono:
            in_u, in_v = self.in_cover(u), self.in_cover(v)
            if not in_u and not in_v:
                self.extra.update((u, v))
                target, branch = u, "case1"
            elif in_u != in_v:
                target, branch = (u if in_u else v), "case2"
            else:
                du, dv = self.degree(u), self.degree(v)
                if du != dv:
                    target = u if du > dv else v
                else:
                    target = min(u, v)
                branch = "case3"
            if self.policy == DETERMINISTIC:
                self.det_recolor(target)
            else:
                self.rand_recolor(target)
        self.stats.max_load_seen = max(self.stats.max_load_seen, max(self.state.load))
        return StepReport(req.t, u, v, branch, self.ledger.total_cost - before, mono, self.ledger.phase_count)

    def _count_recolor(self, v: int, j: int) -> None:
        recolor(self.state, v, j, self.ledger)
        self.chosen[v] = True
        self.stats.recolorings += 1
        self.stats.phase_recolorings += 1

    # -- deterministic policy ----------------------------------------------

    def det_recolor(self, v: int) -> None:
        best, best_res = None, 0
        for j in self.feasible(v):
            res = self.state.residual(j)
            if res > best_res:
                best, best_res = j, res
        if best is None:
            self.det_rebalance()
            return
        self._count_recolor(v, best)

    def det_rebalance(self) -> None:
        n, k = self.n, self.delta
        r = max((len(a) for a in self.adj), default=0)
        classes = r + 1
        if classes > k or -(-n // classes) > -(-n // k):
            classes = k
        new = equitable_coloring(self.adj, r, classes)
        self._apply_rebalance(best_relabel(new, self.state.c, k, classes))

    # -- randomized policy -------------------------------------------------

    def _pick(self, options: list[int]) -> int:
        # the k-th option for k = ceil(X * |L|), X uniform on [0, 1)
        return options[int(self.rng.random() * len(options))]

    def rand_recolor(self, v: int) -> None:
        j = self._pick(self.feasible(v))
        if self.state.residual(j) >= 1:
            self._count_recolor(v, j)
        else:
            self.rand_rebalance()

    def sample_rebalance(self) -> list[int]:
        """One sequential random coloring: each vertex in id order takes a
        uniform color among those its already-colored neighbors left free."""
        n, k, adj = self.n, self.delta, self.adj
        new = [0] * n
        every = range(1, k + 1)
        for v in range(n):
            used = {new[y] for y in adj[v]}
            options = [i for i in every if i not in used]
            new[v] = self._pick(options)
        return new

    def rand_rebalance(self) -> None:
        while True:
            new = self.sample_rebalance()
            loads = np.bincount(new, minlength=self.delta + 1)
            self.stats.rebalance_max_loads.append(int(loads.max()))
            # overflow has probability at most Delta * exp(-eps^2 n / 2 Delta^2)
            if loads.max() <= self.capacity:
                break
        self._apply_rebalance(new)
        self.chosen = [True] * self.n

    def _apply_rebalance(self, new: list[int]) -> None:
        self.ledger.rebalance_calls += 1
        self.stats.rebalances += 1
        self.stats.completed_phase_recolorings.append(self.stats.phase_recolorings)
        self.stats.phase_recolorings = 0
        self.ledger.phase_count += 1
        self.ledger.phases_completed += 1
        for v, col in enumerate(new):
            recolor(self.state, v, col, self.ledger, checked=False)
        self.state.check_capacity()

    # -- audits --------------------------------------------------------------

    def is_proper(self) -> bool:
        c = self.state.c
        return all(c[u] != c[v] for u in range(self.n) for v in self.adj[u])

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]


def run(instance: Instance, requests, policy: str = DETERMINISTIC, rng=None, ledger=None):
    alg = DeltaRecoloring(instance, policy=policy, rng=rng, ledger=ledger)
    reports = [alg.process_request(r) for r in requests]
    return alg.ledger, reports, alg
