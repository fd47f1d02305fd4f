"""Follow-Greedy: lazy optimal orientations for capacitated online 2-recoloring.

Components keep an estimated weight ``E(P)``.  While a component grows by less
than a ``1 + eps/4`` factor over its estimate only merged-in lighter pieces are
flipped; once it outgrows the estimate its closest-to-``c0`` orientation is
recomputed and applied.  When capacity blocks either move the run hands over
to :class:`~recolorlab.fully_dynamic.GreedyRecoloring` for good.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ColoringState,
    ComponentTracker,
    CostLedger,
    InfeasibleInstance,
    Instance,
    InvalidInstance,
    Merged,
    Request,
    SameComponentBipartite,
    SameComponentOdd,
    optimal_orientation,
    recolor,
)
from .fully_dynamic import GreedyRecoloring, StepReport

FOLLOWING = "following"
DELEGATED = "delegated"


@dataclass(frozen=True)
class Delegation:
    t: int
    reason: str
    W: int


class FollowGreedy:
    def __init__(self, instance: Instance, ledger: CostLedger | None = None):
        if instance.k != 2:
            raise InvalidInstance("follow-greedy needs k = 2")
        self.instance = instance
        self.eps = instance.eps
        self.W = instance.B
        self.ledger = ledger if ledger is not None else CostLedger()
        self.state = ColoringState(instance.w, instance.c0, 2, instance.augmented_capacity())
        self.state.check_capacity()
        # singletons start with E({v}) = w(v)
        self.tracker = ComponentTracker(instance.w)
        self.mode = FOLLOWING
        self.greedy: GreedyRecoloring | None = None
        self.delegation: Delegation | None = None
        self.threshold = 1 + self.eps / 4

    def _delegate(self, req: Request, reason: str) -> None:
        self.mode = DELEGATED
        self.delegation = Delegation(req.t, reason, self.W)
        # the live component structure carries over: every edge so far must
        # stay properly colored in the online model
        self.greedy = GreedyRecoloring(
            self.instance,
            ledger=self.ledger,
            state=self.state,
            tracker=self.tracker,
            online=True,
            check_eps=False,
        )
        self.greedy.process_request(req)

    def _flip_fits(self, members) -> bool:
        state = self.state
        on1 = sum(state.w[x] for x in members if state.c[x] == 1)
        on2 = sum(state.w[x] for x in members if state.c[x] == 2)
        return (
            state.load[1] - on1 + on2 <= state.capacity[1]
            and state.load[2] - on2 + on1 <= state.capacity[2]
        )

    def _recompute(self, root: int, req: Request) -> str:
        tracker, state = self.tracker, self.state
        rec = tracker.roots[root]
        rec.estimate = Fraction(rec.weight)
        m, _ = optimal_orientation(tracker, root, self.instance.c0)
        load = list(state.load)
        target = {}
        for x in rec.members:
            col = 1 + (tracker.side(x) ^ (m - 1))
            target[x] = col
            if state.c[x] != col:
                load[state.c[x]] -= state.w[x]
                load[col] += state.w[x]
        if load[1] > state.capacity[1] or load[2] > state.capacity[2]:
            self._delegate(req, "optimal orientation over capacity")
            return "delegate"
        for x, col in target.items():
            recolor(state, x, col, self.ledger, checked=False)
        state.check_capacity()
        return "recompute"

    def _handle(self, req: Request) -> str:
        tracker, state = self.tracker, self.state
        u, v = req.u, req.v
        mono = state.c[u] == state.c[v]
        outcome = tracker.merge(u, v)
        if isinstance(outcome, SameComponentOdd):
            raise InfeasibleInstance(f"request {req.t} closes an odd cycle")
        if isinstance(outcome, SameComponentBipartite):
            return "same-component"
        assert isinstance(outcome, Merged)
        rec = tracker.roots[outcome.heavier]
        grown = rec.weight > self.threshold * rec.estimate
        branch = "merge"
        if mono and not grown:
            if self._flip_fits(outcome.lighter_members):
                for x in outcome.lighter_members:
                    recolor(state, x, 3 - state.c[x], self.ledger, checked=False)
                state.check_capacity()
                branch = "flip"
            else:
                self._delegate(req, "flip over capacity")
                return "delegate"
        if grown:
            branch = self._recompute(outcome.heavier, req)
        return branch

    def process_request(self, req: Request) -> StepReport:
        self.ledger.t = req.t
        before = self.ledger.total_cost
        mono = self.state.c[req.u] == self.state.c[req.v]
        if self.mode == DELEGATED:
            rep = self.greedy.process_request(req)
            return StepReport(req.t, req.u, req.v, "delegated:" + rep.branch, rep.cost, mono, rep.phase)
        branch = self._handle(req)
        return StepReport(
            req.t, req.u, req.v, branch, self.ledger.total_cost - before, mono, self.ledger.phase_count
        )

    @property
    def coloring(self) -> list[int]:
        return self.state.c


def process_request(alg: FollowGreedy, req: Request) -> StepReport:
    return alg.process_request(req)


def run(instance: Instance, requests, ledger: CostLedger | None = None):
    """Run Follow-Greedy over a request list; returns (ledger, reports, alg)."""
    alg = FollowGreedy(instance, ledger=ledger)
    reports = [alg.process_request(r) for r in requests]
    return alg.ledger, reports, alg
