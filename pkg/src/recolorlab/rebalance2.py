"""Packing bipartite components onto two clusters.

``rebalance_fptas`` is the trimmed-list approximation scheme: it finds an
orientation of every component whose weight on cluster 1 lies in
``[W', (1 + eps) W']`` whenever an orientation of weight exactly ``W'`` exists.
``rebalance_exact`` is the pseudo-polynomial reachability DP used to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import ColoringState, ComponentTracker, CostLedger, RecolorError, as_fraction, recolor


class Infeasible(RecolorError):
    """No component assignment meets the requested weight on cluster 1."""


@dataclass(frozen=True)
class Assignment:
    # (component index, j): side A goes to cluster j, side B to cluster 3 - j
    sides: tuple[tuple[int, int], ...]
    total_weight_on_C1: int
    max_list_len: int = 0

    def mirrored(self, total_weight: int) -> "Assignment":
        """Same orientation with the two clusters swapped."""
        return Assignment(
            tuple((i, 3 - j) for i, j in self.sides),
            total_weight - self.total_weight_on_C1,
            self.max_list_len,
        )


def weight_on_c1(components, sides) -> int:
    """Cluster-1 weight of an orientation list; used to re-validate assignments."""
    return sum(components[i][0] if j == 1 else components[i][1] for i, j in sides)


def _unwind(chain) -> tuple[tuple[int, int], ...]:
    out = []
    while chain is not None:
        pair, chain = chain
        out.append(pair)
    out.reverse()
    return tuple(out)


def _trim(items: list, num: int, den: int) -> list:
    """Drop every tuple whose weight is within factor ``1 + num/den`` of the
    next surviving (heavier) tuple.  ``items`` is sorted by weight."""
    if not items:
        return items
    kept = [items[-1]]
    a = items[-1][0]
    for j in range(len(items) - 2, -1, -1):
        x = items[j][0]
        # x * (1 + num/den) >= a, in integers
        if x * (den + num) >= a * den:
            continue
        kept.append(items[j])
        a = x
    kept.reverse()
    return kept


def rebalance_fptas(components: Sequence[tuple[int, int]], target: int, eps) -> Assignment:
    """Orient every component so cluster 1 carries between ``target`` and
    ``(1 + eps) * target`` weight.

    ``components`` lists ``(w(A_i), w(B_i))``.  Raises :class:`Infeasible` when
    no surviving tuple reaches ``target``.
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if target < 0:
        raise ValueError("target weight must be non-negative")
    m = len(components)
    if m == 0:
        if target == 0:
            return Assignment((), 0, 1)
        raise Infeasible("no components")

    # trimming factor 1 + eps / (2m) as an integer ratio num/den
    num, den = eps.numerator, 2 * m * eps.denominator
    limit = (1 + eps) * target

    def truncate(items):
        return [it for it in items if it[0] <= limit]

    a1, b1 = components[0]
    first = [(a1, 0, ((0, 1), None)), (b1, 1, ((0, 2), None))]
    first.sort(key=lambda t: (t[0], t[1]))
    T = truncate(_trim(first, num, den))
    longest = len(T)
    for i in range(1, m):
        a, b = components[i]
        X = [(x + a, 0, ((i, 1), y)) for x, _, y in T]
        Y = [(x + b, 1, ((i, 2), y)) for x, _, y in T]
        merged = sorted(X + Y, key=lambda t: (t[0], t[1]))
        T = truncate(_trim(merged, num, den))
        longest = max(longest, len(T))
        if not T:
            break
    for x, _, chain in T:
        if x >= target:
            return Assignment(_unwind(chain), x, longest)
    raise Infeasible(f"no assignment reaches weight {target} on cluster 1")


def trim_length_bound(m: int, target: int, eps) -> float:
    """Explicit bound on every trimmed list length.

    Survivors are pairwise separated by factor ``1 + eps/(2m)`` within
    ``[1, (1+eps) W']`` (plus possibly a zero), and ``ln(1+z) >= z/2`` on (0,1).
    """
    eps = as_fraction(eps)
    top = float((1 + eps) * max(target, 1))
    return 2 + 4 * m * math.log(top) / float(eps)


def rebalance_exact(components: Sequence[tuple[int, int]], target: int) -> Assignment:
    """Orientation placing exactly ``target`` weight on cluster 1."""
    if target < 0:
        raise Infeasible("negative target")
    mask = (1 << (target + 1)) - 1
    reach = [1]
    for a, b in components:
        prev = reach[-1]
        reach.append(((prev << a) | (prev << b)) & mask)
    if not (reach[-1] >> target) & 1:
        raise Infeasible(f"no assignment has weight exactly {target} on cluster 1")
    sides = []
    s = target
    for i in range(len(components) - 1, -1, -1):
        a, b = components[i]
        prev = reach[i]
        if s >= a and (prev >> (s - a)) & 1:
            sides.append((i, 1))
            s -= a
        else:
            sides.append((i, 2))
            s -= b
    sides.reverse()
    return Assignment(tuple(sides), target, 0)


def snapshot(tracker: ComponentTracker) -> tuple[list[int], list[tuple[int, int]]]:
    """Stable (roots, side weights) view of the live components."""
    roots = tracker.components()
    return roots, [tracker.side_weights(r) for r in roots]


def assignment_cost(state: ColoringState, tracker: ComponentTracker, roots, assignment: Assignment) -> int:
    cost = 0
    for i, j in assignment.sides:
        for v in tracker.members(roots[i]):
            col = j if tracker.side(v) == 0 else 3 - j
            if state.c[v] != col:
                cost += state.w[v]
    return cost


def apply_assignment(
    state: ColoringState,
    tracker: ComponentTracker,
    roots: Sequence[int],
    assignment: Assignment,
    ledger: CostLedger,
) -> int:
    """Recolor every component to its assigned orientation.

    Moves run unchecked, then the final loads are verified against capacity.
    Returns the cost charged.
    """
    before = ledger.total_cost
    for i, j in assignment.sides:
        for v in tracker.members(roots[i]):
            col = j if tracker.side(v) == 0 else 3 - j
            recolor(state, v, col, ledger, checked=False)
    state.check_capacity()
    return ledger.total_cost - before


def cheaper_orientation(state, tracker, roots, assignment: Assignment) -> Assignment:
    """The assignment or its cluster-swapped mirror, whichever moves less weight."""
    mirror = assignment.mirrored(sum(state.w[v] for r in roots for v in tracker.members(r)))
    if assignment_cost(state, tracker, roots, mirror) < assignment_cost(state, tracker, roots, assignment):
        return mirror
    return assignment


__all__ = [
    "Assignment",
    "Infeasible",
    "apply_assignment",
    "assignment_cost",
    "cheaper_orientation",
    "rebalance_exact",
    "rebalance_fptas",
    "snapshot",
    "trim_length_bound",
    "weight_on_c1",
]
