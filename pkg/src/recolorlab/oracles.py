"""Exact offline baselines and certified lower bounds at desk scale."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import CostLedger, Instance, RecolorError, Request
from .rebalance2 import Infeasible

OPT2 = "opt2-dp"
OPT2_ENUM = "opt2-enumerate"
FD_BRUTE = "fd-bruteforce"
MINVC = "min-vertex-cover"
EQUITABLE = "equitable-upper"


class ScaleExceeded(RecolorError):
    """Input is beyond what the exact search is allowed to attempt."""


class NotBipartite(Infeasible):
    """The request graph has an odd cycle, so no proper 2-coloring exists."""


@dataclass(frozen=True)
class OracleReport:
    opt_value: int
    certificate: object
    method: str


def _pairs(sequence) -> list[tuple[int, int]]:
    out = []
    for r in sequence:
        if isinstance(r, Request):
            out.append((r.u, r.v))
        else:
            out.append((int(r[0]), int(r[1])))
    return out


def bipartite_components(n: int, edges: Iterable[tuple[int, int]]):
    """BFS 2-coloring of the graph on ``0..n-1``.

    Returns ``(component id per vertex, side per vertex, component count)``.
    Raises :class:`NotBipartite` on an odd cycle.
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    comp = [-1] * n
    side = [0] * n
    count = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = count
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if comp[y] < 0:
                    comp[y] = count
                    side[y] = side[x] ^ 1
                    queue.append(y)
                elif side[y] == side[x]:
                    raise NotBipartite(f"odd cycle through edge ({x}, {y})")
        count += 1
    return comp, side, count


def _orientation_table(instance: Instance, edges):
    """Per component: cluster-1 weight and recoloring cost of both orientations.

    Orientation 0 puts side 0 on color 1, orientation 1 puts it on color 2.
    """
    comp, side, m = bipartite_components(instance.n, edges)
    weight = np.zeros((m, 2), dtype=np.int64)
    cost = np.zeros((m, 2), dtype=np.int64)
    for v in range(instance.n):
        p, s, wv = comp[v], side[v], instance.w[v]
        for o in (0, 1):
            col = 1 + (s ^ o)
            if col == 1:
                weight[p, o] += wv
            if col != instance.c0[v]:
                cost[p, o] += wv
    return comp, side, weight, cost


def _coloring_from(comp, side, orient) -> list[int]:
    return [1 + (side[v] ^ orient[comp[v]]) for v in range(len(comp))]


def opt_2recoloring(instance: Instance, sequence) -> OracleReport:
    """Minimum online 2-recoloring cost of ``sequence``.

    The online model keeps the coloring proper for every edge seen so far and
    each color within ``B``.  Recoloring straight to the cheapest coloring
    ``c*`` of the final graph that is proper and puts exactly ``B`` on each
    color is feasible at every prefix (each prefix graph is a subgraph, and
    total weight ``2B`` forces exact balance).  Any online solution ends in
    such a coloring and pays at least its weighted Hamming distance from
    ``c0``, so ``d(c*, c0)`` is optimal.  The final graph's components are
    independent apart from the balance constraint, which leaves a min-cost
    subset-sum over component orientations.

    The certificate is the optimal coloring.  Raises :class:`Infeasible`
    when the graph is not bipartite or no exact balance exists.
    """
    if instance.k != 2:
        raise ValueError("2-recoloring oracle needs k = 2")
    comp, side, weight, cost = _orientation_table(instance, _pairs(sequence))
    B = instance.B
    m = len(weight)
    big = np.iinfo(np.int64).max // 4
    best = np.full(B + 1, big, dtype=np.int64)
    best[0] = 0
    choice = np.zeros((m, B + 1), dtype=np.int8)
    for p in range(m):
        nxt = np.full(B + 1, big, dtype=np.int64)
        for o in (0, 1):
            shift = int(weight[p, o])
            if shift > B:
                continue
            cand = np.full(B + 1, big, dtype=np.int64)
            cand[shift:] = best[: B + 1 - shift] + cost[p, o]
            better = cand < nxt
            nxt[better] = cand[better]
            choice[p, better] = o
        best = np.minimum(nxt, big)
    if best[B] >= big:
        raise Infeasible("no orientation puts exactly B on each color")
    orient = [0] * m
    x = B
    for p in range(m - 1, -1, -1):
        o = int(choice[p, x])
        orient[p] = o
        x -= int(weight[p, o])
    coloring = _coloring_from(comp, side, orient)
    return OracleReport(int(best[B]), coloring, OPT2)


def opt_2recoloring_enumerate(instance: Instance, sequence, limit: int = 20) -> OracleReport:
    """Same value as :func:`opt_2recoloring` by trying every orientation vector."""
    comp, side, weight, cost = _orientation_table(instance, _pairs(sequence))
    m = len(weight)
    if m > limit:
        raise ScaleExceeded(f"{m} components exceeds enumeration limit {limit}")
    best, arg = None, None
    for orient in itertools.product((0, 1), repeat=m):
        if sum(int(weight[p, o]) for p, o in enumerate(orient)) != instance.B:
            continue
        c = sum(int(cost[p, o]) for p, o in enumerate(orient))
        if best is None or c < best:
            best, arg = c, orient
    if best is None:
        raise Infeasible("no orientation puts exactly B on each color")
    return OracleReport(best, _coloring_from(comp, side, arg), OPT2_ENUM)


def opt_fully_dynamic_bruteforce(instance: Instance, sequence, max_n: int = 10, max_len: int = 30) -> OracleReport:
    """Exact minimum fully dynamic cost by shortest path over balanced colorings.

    Layer ``t`` holds every coloring with load ``B`` per color that separates
    the endpoints of request ``t``; moving between layers costs the weighted
    Hamming distance.  The certificate is one optimal coloring per request.
    """
    reqs = _pairs(sequence)
    n = instance.n
    if instance.k != 2 or n > max_n or len(reqs) > max_len:
        raise ScaleExceeded(f"brute force limited to k = 2, n <= {max_n}, |sigma| <= {max_len}")
    w = np.asarray(instance.w, dtype=np.int64)
    bits = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8).reshape(-1, n)
    # bit 1 means color 2
    states = bits[(bits == 0).astype(np.int64) @ w == instance.B]
    if len(states) == 0:
        raise Infeasible("no balanced coloring exists")
    diff = states[:, None, :] != states[None, :, :]
    move = (diff * w).sum(axis=2)
    start = np.asarray(instance.c0, dtype=np.int8) - 1
    dist = ((states != start) * w).sum(axis=1)
    big = np.iinfo(np.int64).max // 4
    back = []
    for t, (u, v) in enumerate(reqs):
        ok = states[:, u] != states[:, v]
        if t > 0:
            total = dist[:, None] + move
            arg = total.argmin(axis=0)
            dist = total[arg, np.arange(len(states))]
            back.append(arg)
        dist = np.where(ok, dist, big)
    if not reqs:
        return OracleReport(0, [], FD_BRUTE)
    end = int(dist.argmin())
    path = [end]
    for arg in reversed(back):
        path.append(int(arg[path[-1]]))
    path.reverse()
    cert = [[int(b) + 1 for b in states[i]] for i in path]
    return OracleReport(int(dist[end]), cert, FD_BRUTE)


def fully_dynamic_path_cost(instance: Instance, sequence, path) -> int:
    """Re-validate a fully dynamic certificate and return its cost."""
    reqs = _pairs(sequence)
    if len(path) != len(reqs):
        raise ValueError("one coloring per request expected")
    prev, total = list(instance.c0), 0
    for (u, v), col in zip(reqs, path):
        if col[u] == col[v]:
            raise ValueError("certificate coloring leaves a request monochromatic")
        load = sum(instance.w[x] for x in range(instance.n) if col[x] == 1)
        if load != instance.B:
            raise ValueError("certificate coloring is unbalanced")
        total += sum(instance.w[x] for x in range(instance.n) if col[x] != prev[x])
        prev = col
    return total


# -- vertex cover ------------------------------------------------------------


def _greedy_matching(adj: dict[int, set[int]]) -> int:
    used, size = set(), 0
    for u in adj:
        if u in used:
            continue
        for v in adj[u]:
            if v not in used:
                used.update((u, v))
                size += 1
                break
    return size


def _remove(adj: dict[int, set[int]], vs) -> dict[int, set[int]]:
    vs = set(vs)
    out = {}
    for x, nb in adj.items():
        if x in vs:
            continue
        rest = nb - vs
        if rest:
            out[x] = rest
    return out


def _cover_component(adj: dict[int, set[int]], budget: int):
    """Smallest cover of one component with at most ``budget`` vertices, or None."""
    best: list = [None]

    def search(g: dict[int, set[int]], taken: list[int], limit: int):
        # limit: largest cover size still worth finding
        forced = []
        changed = True
        while changed:
            changed = False
            for x, nb in g.items():
                if len(nb) == 1:
                    (y,) = nb
                    forced.append(y)
                    g = _remove(g, [y])
                    changed = True
                    break
        taken = taken + forced
        if len(taken) > limit:
            return
        if not g:
            best[0] = taken
            return
        if len(taken) + _greedy_matching(g) > limit:
            return
        v = max(g, key=lambda x: (len(g[x]), -x))
        nb = sorted(g[v])
        search(_remove(g, [v]), taken + [v], limit)
        limit = len(best[0]) - 1 if best[0] is not None else limit
        if len(nb) > 1:
            search(_remove(g, nb), taken + nb, limit)

    search(adj, [], budget)
    return best[0]


def min_vertex_cover(edges, budget: int = 20) -> tuple[int, list[int]]:
    """Exact minimum vertex cover by branch and bound per connected component.

    Branches on a maximum-degree vertex (take it, or take all its neighbors),
    forces the neighbor of any degree-one vertex and prunes with a greedy
    matching lower bound.  Raises :class:`ScaleExceeded` when some component
    needs more than ``budget`` vertices.
    """
    adj: dict[int, set[int]] = {}
    for u, v in _pairs(edges):
        if u == v:
            raise ValueError("self-loops have no vertex cover")
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    seen: set[int] = set()
    cover: list[int] = []
    for s in sorted(adj):
        if s in seen:
            continue
        part = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in part:
                    part.add(y)
                    queue.append(y)
        seen |= part
        sub = {x: adj[x] for x in part}
        found = _cover_component(sub, budget)
        if found is None:
            raise ScaleExceeded(f"component of {len(part)} vertices needs a cover above {budget}")
        cover.extend(found)
    cover.sort()
    return len(cover), cover


def is_vertex_cover(edges, cover) -> bool:
    cs = set(cover)
    return all(u in cs or v in cs for u, v in _pairs(edges))


def monochromatic_edges(c0: Sequence[int], sequence) -> list[tuple[int, int]]:
    """Distinct requested edges whose endpoints share their initial color."""
    out, seen = [], set()
    for u, v in _pairs(sequence):
        key = (min(u, v), max(u, v))
        if c0[u] == c0[v] and key not in seen:
            seen.add(key)
            out.append(key)
    return out


def phase_lower_bound(ledger: CostLedger) -> int:
    """Completed phases of a greedy run; the offline optimum pays at least one
    per phase on unweighted instances."""
    return ledger.phases_completed


def delta_opt_upper(instance: Instance, sequence) -> OracleReport:
    """Cost of recoloring once, up front, to an equitable coloring of the final
    graph relabeled to agree with ``c0`` as much as possible."""
    from .delta import best_relabel, equitable_coloring

    n, k = instance.n, instance.k
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in _pairs(sequence):
        adj[u].add(v)
        adj[v].add(u)
    r = max((len(a) for a in adj), default=0)
    if r + 1 > k:
        raise ValueError(f"max degree {r} leaves no proper {k}-coloring guarantee")
    col = best_relabel(equitable_coloring(adj, r, k), list(instance.c0), k)
    cost = sum(1 for a, b in zip(col, instance.c0) if a != b)
    return OracleReport(cost, col, EQUITABLE)


__all__ = [
    "OracleReport",
    "ScaleExceeded",
    "NotBipartite",
    "bipartite_components",
    "opt_2recoloring",
    "opt_2recoloring_enumerate",
    "opt_fully_dynamic_bruteforce",
    "fully_dynamic_path_cost",
    "min_vertex_cover",
    "is_vertex_cover",
    "monochromatic_edges",
    "phase_lower_bound",
    "delta_opt_upper",
]
