"""Adaptive request generators for the lower-bound constructions, plus benign
random sequences.

Adaptive generators look at the algorithm's live coloring before emitting
each request; :func:`play` interleaves one with an algorithm.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import Instance, Request


class Exhausted(Exception):
    """The generator has no fresh vertices left."""


class _BatchDone:
    def __repr__(self):
        return "BatchDone"


BatchDone = _BatchDone()


# -- odd cycle ---------------------------------------------------------------


def odd_cycle_length(n: int) -> int:
    half = n // 2
    return half if half % 2 else half - 1


class OddCycleAdversary:
    """Requests edges of a fixed odd cycle that are monochromatic under the
    algorithm's coloring; one always exists on an odd cycle with two colors."""

    def __init__(self, n: int):
        self.n = n
        self.ell = odd_cycle_length(n)
        if self.ell < 3:
            raise ValueError("need n >= 6 for an odd cycle of length >= 3")
        self.cycle = list(range(self.ell))
        self.pos = 0
        self.emitted = 0

    def edge(self, i: int) -> tuple[int, int]:
        return self.cycle[i], self.cycle[(i + 1) % self.ell]

    def next(self, coloring) -> Request:
        # scan from just past the last emitted edge so requests rotate
        for step in range(self.ell):
            i = (self.pos + step) % self.ell
            a, b = self.edge(i)
            if coloring[a] == coloring[b]:
                self.pos = (i + 1) % self.ell
                self.emitted += 1
                return Request(a, b, self.emitted)
        raise RuntimeError("no monochromatic cycle edge: coloring is not a 2-coloring")

    def initial_coloring(self) -> list[int]:
        """Balanced unit-weight starting coloring: the cycle alternates from
        color 1 (so only the closing edge is monochromatic) and the remaining
        vertices even out the counts."""
        n, ell = self.n, self.ell
        c0 = [1 + (i % 2) for i in range(ell)]
        ones = sum(1 for x in c0 if x == 1)
        rest = n - ell
        need_ones = n // 2 - ones
        c0 += [1] * need_ones + [2] * (rest - need_ones)
        return c0


class OfflineCycleFamily:
    """The reference strategies OFF_1..OFF_ell: strategy i keeps edge
    ``(v_i, v_{i+1})`` as the cycle's only monochromatic edge and pays 2 per
    request on that edge (move one endpoint away and back)."""

    def __init__(self, n: int, c0):
        self.n = n
        self.ell = odd_cycle_length(n)
        self.c0 = list(c0)
        self.costs = [self._initial_cost(i) for i in range(self.ell)]
        self.initial_costs = list(self.costs)

    def coloring(self, i: int, first: int) -> list[int]:
        ell, n = self.ell, self.n
        col = list(self.c0)
        # walk from v_{i+1} around to v_i, alternating from ``first``
        for step in range(ell):
            v = (i + 1 + step) % ell
            col[v] = first if step % 2 == 0 else 3 - first
        ones = sum(1 for x in col if x == 1)
        excess = ones - n // 2
        for v in range(ell, n):
            if excess == 0:
                break
            if excess > 0 and col[v] == 1:
                col[v] = 2
                excess -= 1
            elif excess < 0 and col[v] == 2:
                col[v] = 1
                excess += 1
        if excess:
            raise ValueError("cannot balance the offline coloring")
        return col

    def _initial_cost(self, i: int) -> int:
        best = None
        for first in (1, 2):
            col = self.coloring(i, first)
            d = sum(1 for a, b in zip(col, self.c0) if a != b)
            best = d if best is None else min(best, d)
        return best

    def serve(self, req: Request) -> None:
        a, b = req.u, req.v
        for i in range(self.ell):
            x, y = i, (i + 1) % self.ell
            if {a, b} == {x, y}:
                self.costs[i] += 2
                return
        raise ValueError("request is not a cycle edge")

    @property
    def total(self) -> int:
        return sum(self.costs)

    @property
    def best(self) -> int:
        return min(self.costs)


def odd_cycle_next(adv: OddCycleAdversary, coloring) -> Request:
    return adv.next(coloring)


# -- batches of path merges -------------------------------------------------


class BatchAdversary:
    """Merges equal-size paths pairwise, batch after batch, always joining
    endpoints that currently share a color (deterministic) or random endpoints.

    Batch ``i`` pairs the ``n / 2^(i-1)`` paths of ``2^(i-1)`` vertices into
    ``n / 2^i`` pairs.  In the first batch singletons are paired within color
    classes so that as many requests as possible are monochromatic.
    """

    def __init__(self, n: int, randomized: bool = False, rng: random.Random | None = None):
        size = 1
        while size * 2 <= n:
            size *= 2
        self.n = size
        self.randomized = randomized
        self.rng = rng if rng is not None else random.Random(0)
        self.paths: list[list[int]] = [[v] for v in range(self.n)]
        self.batch = 0
        self.queue: list[tuple[int, int]] = []
        self.emitted = 0
        self.batch_sizes: list[int] = []
        self.finished = False
        self.next_paths: list[list[int]] = []
        self._done_reported = False

    @property
    def batches(self) -> int:
        return self.n.bit_length() - 1

    def _start_batch(self, coloring) -> None:
        self.batch += 1
        order = sorted(range(len(self.paths)), key=lambda i: self.paths[i][0])
        if self.batch == 1 and not self.randomized:
            ones = [i for i in order if coloring[self.paths[i][0]] == 1]
            twos = [i for i in order if coloring[self.paths[i][0]] != 1]
            order = ones + twos
        self.queue = [(order[j], order[j + 1]) for j in range(0, len(order) - 1, 2)]
        self.batch_sizes.append(len(self.queue))
        self.next_paths = []
        self._done_reported = False

    def next(self, coloring):
        """Next request, ``BatchDone`` after the last request of a batch, or
        ``None`` once a single path remains."""
        if self.finished:
            return None
        if not self.queue:
            if self.batch > 0 and not self._done_reported:
                self.paths = self.next_paths
                self._done_reported = True
                return BatchDone
            if len(self.paths) == 1:
                self.finished = True
                return None
            self._start_batch(coloring)
        a_idx, b_idx = self.queue.pop(0)
        pa, pb = self.paths[a_idx], self.paths[b_idx]
        ends_a = [pa[0], pa[-1]] if len(pa) > 1 else [pa[0]]
        ends_b = [pb[0], pb[-1]] if len(pb) > 1 else [pb[0]]
        if self.randomized:
            x, y = self.rng.choice(ends_a), self.rng.choice(ends_b)
        else:
            x, y = ends_a[0], ends_b[0]
            for ea in ends_a:
                hit = [eb for eb in ends_b if coloring[eb] == coloring[ea]]
                if hit:
                    x, y = ea, hit[0]
                    break
        # join so the new path runs ... x, y ...
        left = pa if pa[-1] == x else pa[::-1]
        right = pb if pb[0] == y else pb[::-1]
        self.next_paths.append(left + right)
        self.emitted += 1
        return Request(x, y, self.emitted)

    def component_sizes(self) -> list[int]:
        return sorted(len(p) for p in self.paths)


def batch_next(adv: BatchAdversary, coloring):
    return adv.next(coloring)


# -- delta set ------------------------------------------------------------------


class DeltaSetAdversary:
    """Keeps ``Delta + 1`` active vertices and joins two of them sharing a
    color; vertices reaching the degree cap are swapped for fresh ones."""

    def __init__(self, n: int, delta: int, max_degree: int):
        if n < delta + 1:
            raise ValueError("need at least Delta + 1 vertices")
        self.n = n
        self.delta = delta
        self.max_degree = max_degree
        self.active = list(range(delta + 1))
        self.fresh = delta + 1
        self.degree = [0] * n
        self.emitted = 0
        self.evictions = 0
        self.rounds = 0

    def next(self, coloring) -> Request:
        seen: dict[int, int] = {}
        pair = None
        for v in self.active:
            col = coloring[v]
            if col in seen:
                pair = (seen[col], v)
                break
            seen[col] = v
        if pair is None:
            raise RuntimeError("pigeonhole failed: more colors than expected")
        u, v = pair
        self.degree[u] += 1
        self.degree[v] += 1
        self.emitted += 1
        req = Request(u, v, self.emitted)
        full = [x for x in self.active if self.degree[x] >= self.max_degree]
        if full:
            self.rounds += 1
            for x in full:
                if self.fresh >= self.n:
                    self.active.remove(x)
                    continue
                self.active[self.active.index(x)] = self.fresh
                self.fresh += 1
                self.evictions += 1
        return req

    @property
    def exhausted(self) -> bool:
        return len(self.active) < self.delta + 1


def delta_adversary_next(adv: DeltaSetAdversary, coloring) -> Request:
    if adv.exhausted:
        raise Exhausted("no fresh vertices remain")
    return adv.next(coloring)


# -- benign sequences ---------------------------------------------------------


BIPARTITE_SAFE = "bipartite_safe"
DELTA_SAFE = "delta_safe"
ARBITRARY = "arbitrary"


@dataclass
class RequestSequence:
    requests: list[Request]
    hidden: list[int] | None = None
    meta: dict = field(default_factory=dict)


def balanced_split(w, rng: random.Random) -> list[int]:
    """Random 2-coloring with exactly half the weight on each color, for
    weights laid out in equal consecutive pairs."""
    out = [0] * len(w)
    for i in range(0, len(w), 2):
        if w[i] != w[i + 1]:
            raise ValueError("weights must come in equal consecutive pairs")
        a = rng.randrange(2)
        out[i], out[i + 1] = 1 + a, 2 - a
    return out


def random_weights(n: int, max_weight: int, rng: random.Random) -> list[int]:
    """Weights in equal consecutive pairs, so balanced splits always exist."""
    if n % 2:
        raise ValueError("n must be even")
    w = []
    for _ in range(n // 2):
        x = rng.randint(1, max_weight)
        w += [x, x]
    return w


def random_sequence(n: int, model: str, rng: random.Random, m: int | None = None,
                    hidden: list[int] | None = None, delta: int | None = None,
                    max_degree: int | None = None) -> RequestSequence:
    """Random non-adversarial requests.

    ``bipartite_safe`` only joins vertices on opposite sides of ``hidden`` (a
    balanced 2-coloring); ``delta_safe`` keeps every degree at most
    ``max_degree`` and never repeats an edge; ``arbitrary`` draws any pair.
    """
    m = n if m is None else m
    reqs: list[Request] = []
    if model == BIPARTITE_SAFE:
        if hidden is None:
            hidden = balanced_split([1] * n, rng)
        left = [v for v in range(n) if hidden[v] == 1]
        right = [v for v in range(n) if hidden[v] == 2]
        for t in range(1, m + 1):
            u, v = rng.choice(left), rng.choice(right)
            if rng.randrange(2):
                u, v = v, u
            reqs.append(Request(u, v, t))
        return RequestSequence(reqs, hidden, {"model": model})
    if model == DELTA_SAFE:
        if max_degree is None:
            raise ValueError("delta_safe needs max_degree")
        deg = [0] * n
        seen = set()
        open_vertices = list(range(n))
        tries = 0
        while len(reqs) < m and tries < 20 * m + 1000:
            tries += 1
            if len(open_vertices) < 2:
                break
            u, v = rng.sample(open_vertices, 2)
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            seen.add(key)
            deg[u] += 1
            deg[v] += 1
            reqs.append(Request(u, v, len(reqs) + 1))
            for x in (u, v):
                if deg[x] >= max_degree:
                    i = open_vertices.index(x)
                    open_vertices[i] = open_vertices[-1]
                    open_vertices.pop()
        return RequestSequence(reqs, None, {"model": model, "max_degree": max_degree})
    if model == ARBITRARY:
        for t in range(1, m + 1):
            u, v = rng.sample(range(n), 2)
            reqs.append(Request(u, v, t))
        return RequestSequence(reqs, None, {"model": model})
    raise ValueError(f"unknown model {model!r}")


def online_instance(n: int, eps, rng: random.Random, max_weight: int = 1) -> tuple[Instance, list[int]]:
    """A balanced 2-recoloring instance plus a hidden balanced proper split."""
    w = random_weights(n, max_weight, rng) if max_weight > 1 else [1] * n
    c0 = balanced_split(w, rng)
    hidden = balanced_split(w, rng)
    return Instance(n=n, k=2, w=tuple(w), c0=tuple(c0), B=sum(w) // 2, eps=eps), hidden


def delta_instance(n: int, delta: int, eps, rng: random.Random) -> Instance:
    c0 = [1 + (i % delta) for i in range(n)]
    rng.shuffle(c0)
    return Instance(n=n, k=delta, w=(1,) * n, c0=tuple(c0), B=n // delta, eps=eps)


def play(adversary, alg, coloring_of, limit: int, on_request=None):
    """Drive ``alg`` with ``adversary`` for at most ``limit`` requests.

    ``coloring_of(alg)`` returns the live coloring the adversary observes.
    Returns the emitted requests and the algorithm's step reports.
    """
    reqs, reports = [], []
    t = 0
    while t < limit:
        try:
            req = adversary.next(coloring_of(alg))
        except Exhausted:
            break
        if req is None:
            break
        if req is BatchDone:
            continue
        t += 1
        req = Request(req.u, req.v, t)
        reqs.append(req)
        if on_request is not None:
            on_request(req)
        reports.append(alg.process_request(req))
        if getattr(adversary, "exhausted", False) is True:
            break
    return reqs, reports
