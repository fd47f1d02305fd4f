import random
from collections import deque
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recolorlab.core import (
    CapacityViolation,
    ColoringState,
    ComponentTracker,
    CostLedger,
    Instance,
    InvalidInstance,
    Merged,
    OddComponent,
    Request,
    SameComponentBipartite,
    SameComponentOdd,
    is_proper,
    optimal_orientation,
    recolor,
)


def test_recolor_to_same_color_is_free():
    s = ColoringState([1, 1], [1, 2], 2, 5)
    led = CostLedger()
    assert recolor(s, 0, 1, led) == 0
    assert s.c == [1, 2] and led.total_cost == 0 and led.recolor_events == 0


def test_recolor_moves_weight_between_residuals():
    s = ColoringState([3, 1], [1, 2], 2, 5)
    led = CostLedger()
    r1, r2 = s.residual(1), s.residual(2)
    assert recolor(s, 0, 2, led) == 3
    assert s.residual(1) == r1 + 3 and s.residual(2) == r2 - 3
    assert led.total_cost == 3


def test_checked_recolor_into_full_color_raises():
    s = ColoringState([1, 1, 1, 1], [1, 1, 2, 2], 2, 2)
    with pytest.raises(CapacityViolation):
        recolor(s, 0, 2, CostLedger())
    assert s.c == [1, 1, 2, 2]


def test_unchecked_recolor_then_check_capacity():
    s = ColoringState([1, 1, 1, 1], [1, 1, 2, 2], 2, 2)
    recolor(s, 0, 2, CostLedger(), checked=False)
    with pytest.raises(CapacityViolation):
        s.check_capacity()


def test_recolor_rejects_color_out_of_range():
    s = ColoringState([1, 1], [1, 2], 2, 2)
    with pytest.raises(ValueError):
        recolor(s, 0, 3, CostLedger())


def test_ledger_log_records_changes_only():
    led = CostLedger(log=[])
    s = ColoringState([2, 2], [1, 2], 2, 4)
    led.t = 5
    recolor(s, 0, 1, led)
    recolor(s, 0, 2, led)
    assert led.log == [(5, 0, 1, 2, 2)]


def test_instance_validation():
    with pytest.raises(InvalidInstance):
        Instance(3, 2, (1, 1, 1), (1, 2, 1), 1, Fraction(1, 2))  # odd total
    with pytest.raises(InvalidInstance):
        Instance(2, 2, (1, 1), (1, 2), 2, Fraction(1, 2))  # B is not half
    with pytest.raises(InvalidInstance):
        Instance(3, 2, (4, 1, 1), (1, 2, 2), 3, Fraction(1, 2))  # vertex heavier than B
    with pytest.raises(InvalidInstance):
        Instance(4, 2, (1,) * 4, (1, 2, 1, 3), 2, Fraction(1, 2))  # color out of range
    with pytest.raises(InvalidInstance):
        Instance(4, 2, (1,) * 4, (1, 2, 1, 2), 2, Fraction(1))  # eps not below 1
    with pytest.raises(InvalidInstance):
        Instance(6, 3, (1,) * 6, (1, 1, 1, 2, 2, 3), 2, Fraction(1, 2))  # unbalanced delta c0
    with pytest.raises(InvalidInstance):
        Instance(5, 3, (1,) * 5, (1, 1, 2, 2, 3), 1, Fraction(1, 2))  # n not divisible
    inst = Instance(4, 2, (1, 1, 1, 1), (1, 2, 1, 2), 2, 0.25)
    assert inst.eps == Fraction(1, 4)
    assert inst.augmented_capacity() == 2


def test_request_rejects_self_loop():
    with pytest.raises(ValueError):
        Request(3, 3)


def test_merge_two_singletons():
    t = ComponentTracker([1, 1])
    out = t.merge(0, 1)
    assert isinstance(out, Merged)
    # singletons both start on side A, so the endpoints clash
    assert out.orientation_match is False
    assert t.side(0) != t.side(1)


def test_merge_triangle_is_odd():
    t = ComponentTracker([1, 1, 1])
    t.merge(0, 1)
    t.merge(1, 2)
    assert isinstance(t.merge(0, 2), SameComponentOdd)
    assert t.record(0).odd


def test_merge_even_cycle_stays_bipartite():
    t = ComponentTracker([1] * 4)
    for u, v in [(0, 1), (1, 2), (2, 3)]:
        t.merge(u, v)
    assert isinstance(t.merge(0, 3), SameComponentBipartite)


def test_heavier_root_survives_and_ties_keep_u():
    t = ComponentTracker([1, 5, 1])
    out = t.merge(0, 1)
    assert out.heavier == 1 and out.lighter == 0
    assert out.lighter_members == (0,)
    t2 = ComponentTracker([2, 2])
    assert t2.merge(1, 0).heavier == 1


def test_optimal_orientation_examples():
    t = ComponentTracker([1, 2])
    t.merge(0, 1)
    root = t.find(0)
    m, d = optimal_orientation(t, root, [1, 2] if t.side(0) == 0 else [2, 1])
    assert (m, d) == (1, 0)
    t = ComponentTracker([1, 1])
    t.merge(0, 1)
    # both endpoints initially color 1: either orientation moves one unit
    assert optimal_orientation(t, t.find(0), [1, 1]) == (1, 1)


def test_optimal_orientation_rejects_odd():
    t = ComponentTracker([1, 1, 1])
    for u, v in [(0, 1), (1, 2), (2, 0)]:
        t.merge(u, v)
    with pytest.raises(OddComponent):
        optimal_orientation(t, t.find(0), [1, 2, 1])


def bfs_parity(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    comp, side, odd = [-1] * n, [0] * n, {}
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s], odd[s] = s, False
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if comp[y] < 0:
                    comp[y], side[y] = s, side[x] ^ 1
                    q.append(y)
                elif side[x] == side[y]:
                    odd[s] = True
    return comp, side, odd


edge_lists = st.integers(2, 30).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=60),
        st.lists(st.integers(1, 9), min_size=n, max_size=n),
    )
)


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_tracker_agrees_with_bfs(data):
    n, edges, w = data
    t = ComponentTracker(w)
    for u, v in edges:
        t.merge(u, v)
    comp, side, odd = bfs_parity(n, edges)
    for v in range(n):
        r = t.find(v)
        assert t.find(comp[v]) == r
        assert t.roots[r].odd == odd[comp[v]]
        if not odd[comp[v]]:
            assert (t.side(v) == t.side(comp[v])) == (side[v] == side[comp[v]])
    for r, rec in t.roots.items():
        assert rec.wA + rec.wB == sum(w[x] for x in rec.members)
        assert rec.nA + rec.nB == len(rec.members)
        assert rec.wA == sum(w[x] for x in rec.members if t.side(x) == 0)
    assert sorted(x for rec in t.roots.values() for x in rec.members) == list(range(n))


@settings(max_examples=150, deadline=None)
@given(edge_lists, st.randoms(use_true_random=False))
def test_optimal_orientation_is_min_of_both(data, rnd):
    n, edges, w = data
    c0 = [rnd.choice((1, 2)) for _ in range(n)]
    t = ComponentTracker(w)
    for u, v in edges:
        t.merge(u, v)
    for r, rec in t.roots.items():
        if rec.odd:
            continue
        cand = []
        for o in (1, 2):
            cand.append(sum(w[x] for x in rec.members if (1 + (t.side(x) ^ (o - 1))) != c0[x]))
        m, d = optimal_orientation(t, r, c0)
        assert d == min(cand) and d == cand[m - 1]
        assert 2 * d <= rec.weight
        if cand[0] == cand[1]:
            assert m == 1


def test_orientation_monotone_under_extension():
    rnd = random.Random(7)
    for _ in range(200):
        n = rnd.randint(2, 20)
        w = [rnd.randint(1, 5) for _ in range(n)]
        c0 = [rnd.choice((1, 2)) for _ in range(n)]
        hidden = [rnd.choice((0, 1)) for _ in range(n)]
        t = ComponentTracker(w)
        # grow one bipartite component from vertex 0 with edges across ``hidden``
        inside = [0]
        for v in range(1, n):
            u = rnd.choice(inside)
            if hidden[u] == hidden[v]:
                continue
            t.merge(u, v)
            inside.append(v)
        if len(inside) < 2:
            continue
        small = inside[: max(1, len(inside) // 2)]
        root = t.find(0)
        m_big, d_big = optimal_orientation(t, root, c0)

        def d_on(vertices, orient):
            return sum(w[x] for x in vertices if 1 + (t.side(x) ^ (orient - 1)) != c0[x])

        # an insertion-order prefix is connected, so it is a sub-component
        d_small = min(d_on(small, 1), d_on(small, 2))
        assert d_small <= d_on(small, m_big) <= d_big


def test_loads_reconcile_after_random_moves():
    rnd = random.Random(3)
    w = [rnd.randint(1, 4) for _ in range(30)]
    s = ColoringState(w, [rnd.choice((1, 2, 3)) for _ in w], 3, 1000)
    led = CostLedger()
    for _ in range(500):
        recolor(s, rnd.randrange(30), rnd.randint(1, 3), led)
    assert s.reconcile()
    assert sum(s.load) == sum(w)
    assert s.copy().load == s.load


def test_is_proper():
    assert is_proper([1, 2, 1], [(0, 1), (1, 2)])
    assert not is_proper([1, 2, 1], [(0, 2)])
