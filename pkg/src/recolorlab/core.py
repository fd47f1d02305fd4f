"""Instance model, capacity-aware coloring state, bipartite component tracking
and cost accounting shared by every recoloring algorithm.

Colors are 1-based (``1..k``); vertices are ``0..n-1``.  All weights are
positive integers and capacities are stored as integers (the floor of the
rational capacity, which is exact because loads are integral).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class RecolorError(Exception):
    """Base class for errors raised by this package."""


class CapacityViolation(RecolorError):
    """A committed recoloring left a color over capacity (an algorithm bug)."""


class OddComponent(RecolorError):
    """Operation requires a bipartite component."""


class InvalidInstance(RecolorError):
    pass


class InfeasibleInstance(RecolorError):
    """The request sequence violates the online model assumptions."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    return Fraction(value)


@dataclass(frozen=True)
class Instance:
    n: int
    k: int
    w: tuple[int, ...]
    c0: tuple[int, ...]
    B: int
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(int(x) for x in self.w))
        object.__setattr__(self, "c0", tuple(int(x) for x in self.c0))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        self.validate()

    def validate(self) -> None:
        if self.n < 1 or len(self.w) != self.n or len(self.c0) != self.n:
            raise InvalidInstance("weights and initial coloring must cover all n vertices")
        if not 0 < self.eps < 1:
            raise InvalidInstance(f"eps must lie in (0, 1), got {self.eps}")
        if any(x <= 0 for x in self.w):
            raise InvalidInstance("weights must be positive integers")
        if any(not 1 <= c <= self.k for c in self.c0):
            raise InvalidInstance("initial colors must lie in [1, k]")
        total = sum(self.w)
        if self.k == 2:
            if total % 2:
                raise InvalidInstance("total weight must be even for 2-recoloring")
            if self.B != total // 2:
                raise InvalidInstance(f"B must equal half the total weight ({total // 2})")
            if max(self.w) > self.B:
                raise InvalidInstance("no vertex may weigh more than half the total")
        else:
            if any(x != 1 for x in self.w):
                raise InvalidInstance("delta-recoloring instances are unweighted")
            if self.n % self.k:
                raise InvalidInstance("n must be divisible by the number of colors")
            if self.B != self.n // self.k:
                raise InvalidInstance("B must equal n / k")
            counts = [0] * (self.k + 1)
            for c in self.c0:
                counts[c] += 1
            if any(counts[i] != self.B for i in range(1, self.k + 1)):
                raise InvalidInstance("initial coloring must put exactly n/k vertices on each color")

    @property
    def total_weight(self) -> int:
        return sum(self.w)

    def augmented_capacity(self, eps: Fraction | None = None) -> int:
        """Integer capacity equivalent to ``(1 + eps) * B`` for integral loads."""
        eps = self.eps if eps is None else eps
        return math.floor((1 + eps) * self.B)

    @classmethod
    def unit(cls, c0: Sequence[int], k: int, eps) -> "Instance":
        n = len(c0)
        return cls(n=n, k=k, w=(1,) * n, c0=tuple(c0), B=n // k, eps=eps)


@dataclass(frozen=True)
class Request:
    u: int
    v: int
    t: int = 0

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"request endpoints must differ, got ({self.u}, {self.v})")


@dataclass
class CostLedger:
    total_cost: int = 0
    recolor_events: int = 0
    rebalance_calls: int = 0
    phase_count: int = 0
    phases_completed: int = 0
    # (t, vertex, old color, new color, weight); only color-changing events
    log: list | None = None
    t: int = 0

    def charge(self, v: int, old: int, new: int, weight: int) -> None:
        self.total_cost += weight
        self.recolor_events += 1
        if self.log is not None:
            self.log.append((self.t, v, old, new, weight))


class ColoringState:
    """Current coloring plus per-color loads and integer capacities."""

    def __init__(self, w: Sequence[int], colors: Sequence[int], k: int, capacity):
        self.w = list(w)
        self.c = list(colors)
        self.k = k
        if isinstance(capacity, int):
            capacity = [capacity] * k
        # index 0 unused so colors index directly
        self.capacity = [0] + list(capacity)
        self.load = [0] * (k + 1)
        for v, col in enumerate(self.c):
            self.load[col] += self.w[v]

    def residual(self, i: int) -> int:
        return self.capacity[i] - self.load[i]

    def copy(self) -> "ColoringState":
        other = ColoringState.__new__(ColoringState)
        other.w = self.w
        other.c = list(self.c)
        other.k = self.k
        other.capacity = list(self.capacity)
        other.load = list(self.load)
        return other

    def reconcile(self) -> bool:
        """True iff stored loads agree with a from-scratch recount."""
        recount = [0] * (self.k + 1)
        for v, col in enumerate(self.c):
            recount[col] += self.w[v]
        return recount == self.load

    def check_capacity(self) -> None:
        for i in range(1, self.k + 1):
            if self.load[i] > self.capacity[i]:
                raise CapacityViolation(
                    f"color {i} load {self.load[i]} exceeds capacity {self.capacity[i]}"
                )


def recolor(state: ColoringState, v: int, i: int, ledger: CostLedger, checked: bool = True) -> int:
    """Move ``v`` to color ``i`` and charge ``w(v)`` if its color changes.

    Returns the cost charged.  With ``checked`` the move must fit the residual
    capacity of ``i``; unchecked moves are used inside bulk rebalancing, which
    reconciles capacities once at the end.
    """
    if not 1 <= i <= state.k:
        raise ValueError(f"color {i} out of range")
    old = state.c[v]
    if old == i:
        return 0
    wv = state.w[v]
    if checked and state.residual(i) < wv:
        raise CapacityViolation(f"recolor({v}, {i}) needs {wv}, residual {state.residual(i)}")
    state.c[v] = i
    state.load[old] -= wv
    state.load[i] += wv
    ledger.charge(v, old, i, wv)
    return wv


@dataclass(frozen=True)
class StepReport:
    """Audit record of one processed request."""

    t: int
    u: int
    v: int
    branch: str
    cost: int
    mono_at_arrival: bool
    phase: int
    new_phase: bool = False


@dataclass(frozen=True)
class SameComponentBipartite:
    root: int


@dataclass(frozen=True)
class SameComponentOdd:
    root: int


@dataclass(frozen=True)
class Merged:
    heavier: int
    lighter: int
    orientation_match: bool
    # side weights of the lighter component before merging, relative to its
    # own parity (A = parity 0)
    lighter_wA: int = 0
    lighter_wB: int = 0
    lighter_members: tuple = ()


MergeOutcome = SameComponentBipartite | SameComponentOdd | Merged


@dataclass
class _Root:
    wA: int
    wB: int
    nA: int
    nB: int
    estimate: Fraction
    odd: bool = False
    members: list = field(default_factory=list)

    @property
    def weight(self) -> int:
        return self.wA + self.wB


class ComponentTracker:
    """Union-find over vertices with a parity bit giving each vertex's side.

    Parity 0 is side A, parity 1 side B, relative to the component root.
    Singletons start on side A.  The heavier-by-weight root survives merges.
    """

    def __init__(self, w: Sequence[int]):
        n = len(w)
        self.w = list(w)
        self.parent = list(range(n))
        self.rank = [0] * n
        self.parity = [0] * n
        self.roots: dict[int, _Root] = {
            v: _Root(wA=w[v], wB=0, nA=1, nB=0, estimate=Fraction(w[v]), members=[v])
            for v in range(n)
        }

    def find(self, v: int) -> int:
        path = []
        while self.parent[v] != v:
            path.append(v)
            v = self.parent[v]
        root = v
        # compress, accumulating parity from the top of the path down
        acc = 0
        for x in reversed(path):
            acc ^= self.parity[x]
            self.parity[x] = acc
            self.parent[x] = root
        return root

    def side(self, v: int) -> int:
        """0 for side A, 1 for side B."""
        r = self.find(v)
        return 0 if r == v else self.parity[v]

    def record(self, v: int) -> _Root:
        return self.roots[self.find(v)]

    def weight(self, v: int) -> int:
        return self.record(v).weight

    def members(self, root: int) -> list[int]:
        return self.roots[root].members

    def components(self) -> list[int]:
        """Live roots in ascending id order (a stable snapshot ordering)."""
        return sorted(self.roots)

    def side_weights(self, root: int) -> tuple[int, int]:
        rec = self.roots[root]
        return rec.wA, rec.wB

    def merge(self, u: int, v: int) -> MergeOutcome:
        ru, rv = self.find(u), self.find(v)
        pu, pv = self.side(u), self.side(v)
        if ru == rv:
            if pu != pv:
                return SameComponentBipartite(ru)
            self.roots[ru].odd = True
            return SameComponentOdd(ru)
        a, b = self.roots[ru], self.roots[rv]
        # ties keep u's component as the survivor
        if b.weight > a.weight:
            heavy, light, hrec, lrec = rv, ru, b, a
        else:
            heavy, light, hrec, lrec = ru, rv, a, b
        match = pu != pv
        flip = 0 if match else 1
        lwA, lwB = lrec.wA, lrec.wB
        lmembers = tuple(lrec.members)
        self.parent[light] = heavy
        self.parity[light] = flip
        if flip:
            hrec.wA += lrec.wB
            hrec.wB += lrec.wA
            hrec.nA += lrec.nB
            hrec.nB += lrec.nA
        else:
            hrec.wA += lrec.wA
            hrec.wB += lrec.wB
            hrec.nA += lrec.nA
            hrec.nB += lrec.nB
        hrec.odd = hrec.odd or lrec.odd
        if len(hrec.members) < len(lrec.members):
            hrec.members, lrec.members = lrec.members, hrec.members
        hrec.members.extend(lrec.members)
        if self.rank[heavy] <= self.rank[light]:
            self.rank[heavy] = self.rank[light] + 1
        del self.roots[light]
        return Merged(heavy, light, match, lwA, lwB, lmembers)


def merge_components(tracker: ComponentTracker, u: int, v: int) -> MergeOutcome:
    return tracker.merge(u, v)


def orientation_colors(tracker: ComponentTracker, root: int, orientation: int) -> dict[int, int]:
    """Colors of the component's members under an orientation.

    Orientation 1 puts side A on color 1 and side B on color 2; orientation 2
    swaps them.
    """
    out = {}
    for v in tracker.members(root):
        s = tracker.side(v)
        out[v] = 1 + (s ^ (orientation - 1))
    return out


def distance(colors: dict[int, int], c0: Sequence[int], w: Sequence[int]) -> int:
    """Weighted Hamming distance of a partial coloring from ``c0``."""
    return sum(w[v] for v, col in colors.items() if col != c0[v])


def optimal_orientation(tracker: ComponentTracker, root: int, c0: Sequence[int]) -> tuple[int, int]:
    """Orientation of a bipartite component closest to ``c0``; ties go to 1."""
    rec = tracker.roots[root]
    if rec.odd:
        raise OddComponent(f"component {root} is not bipartite")
    d1 = 0
    w = tracker.w
    for v in rec.members:
        want = 1 if tracker.side(v) == 0 else 2
        if c0[v] != want:
            d1 += w[v]
    d2 = rec.weight - d1
    if d2 < d1:
        return 2, d2
    return 1, d1


def is_proper(colors: Sequence[int], edges: Iterable[tuple[int, int]]) -> bool:
    return all(colors[u] != colors[v] for u, v in edges)
