"""Phase-based greedy recoloring for fully dynamic capacitated 2-recoloring.

Each phase starts from singleton components with balanced clusters.  On a
request between two components the lighter one is merged into the heavier and,
if the endpoints clash, flipped when it is small and fits; otherwise the whole
component set is rebalanced.  A phase ends when a component stops being
bipartite or no balanced assignment exists.
"""

from __future__ import annotations

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
    StepReport,
    recolor,
)
from .rebalance2 import Infeasible, apply_assignment, cheaper_orientation, rebalance_fptas, snapshot

SAME = "same-component"
ODD = "odd-cycle"
MERGE = "merge"
FLIP = "flip"
REBALANCE = "rebalance"
INFEASIBLE = "rebalance-infeasible"


class GreedyRecoloring:
    """Greedy recoloring with phases.

    ``W`` is the phase weight parameter (``B`` for standalone runs) and every
    cluster gets capacity ``floor((1 + eps) * B)``.  With ``online=True`` the
    instance is promised to stay bipartite and balanced, so the phase-ending
    branches raise :class:`InfeasibleInstance` instead of starting a new phase.
    """

    def __init__(
        self,
        instance: Instance,
        ledger: CostLedger | None = None,
        state: ColoringState | None = None,
        tracker: ComponentTracker | None = None,
        online: bool = False,
        check_eps: bool = True,
    ):
        if instance.k != 2:
            raise InvalidInstance("greedy recoloring needs k = 2")
        if check_eps and instance.eps < Fraction(8, instance.n):
            raise InvalidInstance(f"eps must be at least 8/n = {Fraction(8, instance.n)}")
        self.instance = instance
        self.eps = instance.eps
        self.W = instance.B
        self.ledger = ledger if ledger is not None else CostLedger()
        if state is None:
            state = ColoringState(instance.w, instance.c0, 2, instance.augmented_capacity())
        self.state = state
        self.online = online
        self.phase_start_t = 0
        self.tracker = tracker
        self.start_phase(keep_components=tracker is not None)

    @property
    def phase_index(self) -> int:
        return self.ledger.phase_count

    def start_phase(self, keep_components: bool = False) -> int:
        """Reset to singleton components and restore balanced loads.

        When the current loads already sit within ``(1 + eps/2) W`` the coloring
        is itself a valid rebalance result and nothing moves.  Returns the cost.
        """
        before = self.ledger.total_cost
        if not keep_components or self.tracker is None:
            self.tracker = ComponentTracker(self.instance.w)
        self.ledger.phase_count += 1
        self.phase_start_t = self.ledger.t
        limit = (1 + self.eps / 2) * self.W
        if keep_components or max(self.state.load[1], self.state.load[2]) > limit:
            try:
                self._rebalance()
            except Infeasible as exc:
                if self.online:
                    raise InfeasibleInstance("components admit no balanced assignment") from exc
                raise InvalidInstance("instance admits no balanced starting assignment") from exc
        return self.ledger.total_cost - before

    def _rebalance(self) -> None:
        self.ledger.rebalance_calls += 1
        roots, comps = snapshot(self.tracker)
        assignment = rebalance_fptas(comps, self.W, self.eps / 2)
        assignment = cheaper_orientation(self.state, self.tracker, roots, assignment)
        apply_assignment(self.state, self.tracker, roots, assignment, self.ledger)

    def _end_phase(self, req: Request) -> None:
        if self.online:
            raise InfeasibleInstance(f"request {req.t} breaks the online model assumptions")
        state = self.state
        recolor(state, req.u, 3 - state.c[req.u], self.ledger, checked=False)
        self.ledger.phases_completed += 1
        self.start_phase()
        # the triggering request opens the next phase
        branch = self._handle(req)
        if branch in (ODD, INFEASIBLE):
            raise RuntimeError("fresh phase could not absorb its first request")
        state.check_capacity()

    def _handle(self, req: Request) -> str:
        state, tracker = self.state, self.tracker
        u, v = req.u, req.v
        mono = state.c[u] == state.c[v]
        outcome = tracker.merge(u, v)
        if isinstance(outcome, SameComponentBipartite):
            if mono:
                raise RuntimeError("component coloring drifted from its bipartition")
            return SAME
        if isinstance(outcome, SameComponentOdd):
            self._end_phase(req)
            return ODD
        assert isinstance(outcome, Merged)
        if not mono:
            return MERGE
        members = outcome.lighter_members
        w = state.w
        on1 = sum(w[x] for x in members if state.c[x] == 1)
        on2 = sum(w[x] for x in members if state.c[x] == 2)
        small = 4 * (on1 + on2) <= self.eps * self.W
        fits = (
            state.load[1] - on1 + on2 <= state.capacity[1]
            and state.load[2] - on2 + on1 <= state.capacity[2]
        )
        if small and fits:
            for x in members:
                recolor(state, x, 3 - state.c[x], self.ledger, checked=False)
            state.check_capacity()
            return FLIP
        try:
            self._rebalance()
        except Infeasible:
            self._end_phase(req)
            return INFEASIBLE
        return REBALANCE

    def process_request(self, req: Request) -> StepReport:
        self.ledger.t = req.t
        before = self.ledger.total_cost
        phases = self.ledger.phase_count
        mono = self.state.c[req.u] == self.state.c[req.v]
        branch = self._handle(req)
        return StepReport(
            t=req.t,
            u=req.u,
            v=req.v,
            branch=branch,
            cost=self.ledger.total_cost - before,
            mono_at_arrival=mono,
            phase=self.ledger.phase_count,
            new_phase=self.ledger.phase_count != phases,
        )


def start_phase(alg: GreedyRecoloring) -> int:
    return alg.start_phase()


def process_request(alg: GreedyRecoloring, req: Request) -> StepReport:
    return alg.process_request(req)


def run(instance: Instance, requests, ledger: CostLedger | None = None, check_eps: bool = True):
    """Run greedy recoloring over a request list; returns (ledger, reports, alg)."""
    alg = GreedyRecoloring(instance, ledger=ledger, check_eps=check_eps)
    reports = [alg.process_request(r) for r in requests]
    return alg.ledger, reports, alg
