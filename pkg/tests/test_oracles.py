import itertools
import random
from fractions import Fraction

import pytest

from recolorlab.adversaries import ARBITRARY, BIPARTITE_SAFE, balanced_split, random_sequence, random_weights
from recolorlab.core import CostLedger, Instance, Request
from recolorlab.fully_dynamic import GreedyRecoloring
from recolorlab.oracles import (
    NotBipartite,
    ScaleExceeded,
    delta_opt_upper,
    fully_dynamic_path_cost,
    is_vertex_cover,
    min_vertex_cover,
    opt_2recoloring,
    opt_2recoloring_enumerate,
    opt_fully_dynamic_bruteforce,
    phase_lower_bound,
)
from recolorlab.rebalance2 import Infeasible


def reqs(pairs):
    return [Request(u, v, t) for t, (u, v) in enumerate(pairs, 1)]


def brute_online_opt(inst, pairs):
    """Cheapest proper, exactly balanced coloring over all 2^n colorings."""
    best = None
    for col in itertools.product((1, 2), repeat=inst.n):
        if any(col[u] == col[v] for u, v in pairs):
            continue
        if sum(inst.w[v] for v in range(inst.n) if col[v] == 1) != inst.B:
            continue
        d = sum(inst.w[v] for v in range(inst.n) if col[v] != inst.c0[v])
        best = d if best is None else min(best, d)
    return best


def test_proper_balanced_c0_costs_nothing():
    inst = Instance.unit((1, 2, 1, 2), 2, Fraction(1, 2))
    assert opt_2recoloring(inst, reqs([(0, 1), (2, 3), (1, 2)])).opt_value == 0


def test_forced_flip_of_cheaper_side():
    # path 0-1-2-3, weights 1,3,3,1, c0 = 1,1,2,2: coloring it 1,2,1,2 moves
    # weight 6 and 2,1,2,1 moves weight 2; both balance with {4,5} as is
    inst = Instance(6, 2, (1, 3, 3, 1, 2, 2), (1, 1, 2, 2, 1, 2), 6, Fraction(1, 2))
    pairs = [(0, 1), (1, 2), (2, 3), (4, 5)]
    got = opt_2recoloring(inst, reqs(pairs))
    assert got.opt_value == brute_online_opt(inst, pairs) == 2


def test_certificate_revalidates():
    rnd = random.Random(3)
    for _ in range(50):
        n = 2 * rnd.randint(2, 7)
        w = random_weights(n, 4, rnd)
        hidden = balanced_split(w, rnd)
        inst = Instance(n, 2, tuple(w), tuple(balanced_split(w, rnd)), sum(w) // 2, Fraction(1, 2))
        seq = random_sequence(n, BIPARTITE_SAFE, rnd, m=rnd.randint(0, 2 * n), hidden=hidden).requests
        pairs = [(r.u, r.v) for r in seq]
        rep = opt_2recoloring(inst, seq)
        col = rep.certificate
        assert all(col[u] != col[v] for u, v in pairs)
        assert sum(w[v] for v in range(n) if col[v] == 1) == inst.B
        assert sum(w[v] for v in range(n) if col[v] != inst.c0[v]) == rep.opt_value
        assert rep.opt_value == brute_online_opt(inst, pairs)
        assert rep.opt_value == opt_2recoloring_enumerate(inst, seq).opt_value


def test_opt2_rejects_odd_cycle_and_imbalance():
    inst = Instance.unit((1, 2, 1, 2), 2, Fraction(1, 2))
    with pytest.raises(NotBipartite):
        opt_2recoloring(inst, reqs([(0, 1), (1, 2), (2, 0)]))
    # star 0-{1,2,3}: sides of weight 1 and 3, never 2 and 2
    with pytest.raises(Infeasible):
        opt_2recoloring(inst, reqs([(0, 1), (0, 2), (0, 3)]))


def test_fd_bruteforce_examples():
    inst = Instance.unit((1, 2, 1, 2, 1, 2), 2, Fraction(1, 2))
    assert opt_fully_dynamic_bruteforce(inst, reqs([(0, 1), (1, 2)])).opt_value == 0
    # triangle 0,1,2 under c0 = 1,2,1: the closing edge forces a swap of two
    # vertices because the offline coloring stays exactly balanced
    tri = reqs([(0, 1), (1, 2), (2, 0)])
    rep = opt_fully_dynamic_bruteforce(inst, tri)
    assert rep.opt_value == 2
    assert fully_dynamic_path_cost(inst, tri, rep.certificate) == 2
    assert opt_fully_dynamic_bruteforce(inst, []).opt_value == 0


def test_fd_bruteforce_scale_limits():
    inst = Instance.unit((1, 2) * 6, 2, Fraction(1, 2))
    with pytest.raises(ScaleExceeded):
        opt_fully_dynamic_bruteforce(inst, [])


def layered_dp(inst, pairs):
    """Independent sequential optimum by dictionary relaxation."""
    n = inst.n
    states = [s for s in itertools.product((1, 2), repeat=n) if sum(inst.w[v] for v in range(n) if s[v] == 1) == inst.B]

    def ham(a, b):
        return sum(inst.w[v] for v in range(n) if a[v] != b[v])

    cur = {tuple(inst.c0): 0}
    for u, v in pairs:
        cur = {s: min(c + ham(p, s) for p, c in cur.items()) for s in states if s[u] != s[v]}
    return min(cur.values()) if pairs else 0


def test_fd_bruteforce_matches_independent_dp_and_bounds_phases():
    rnd = random.Random(19)
    for _ in range(60):
        n = rnd.choice((4, 6))
        c0 = balanced_split([1] * n, rnd)
        inst = Instance.unit(c0, 2, Fraction(1, 2))
        seq = random_sequence(n, ARBITRARY, rnd, m=rnd.randint(0, 8)).requests
        pairs = [(r.u, r.v) for r in seq]
        rep = opt_fully_dynamic_bruteforce(inst, seq)
        assert rep.opt_value == layered_dp(inst, pairs)
        if pairs:
            assert fully_dynamic_path_cost(inst, seq, rep.certificate) == rep.opt_value
        alg = GreedyRecoloring(inst, check_eps=False)
        for r in seq:
            alg.process_request(r)
        assert phase_lower_bound(alg.ledger) <= rep.opt_value


def test_phase_lower_bound():
    assert phase_lower_bound(CostLedger()) == 0
    assert phase_lower_bound(CostLedger(phases_completed=7)) == 7


def test_min_vertex_cover_examples():
    assert min_vertex_cover([(0, 1), (1, 2), (2, 0)])[0] == 2
    assert min_vertex_cover([(0, i) for i in range(1, 6)]) == (1, [0])
    assert min_vertex_cover([]) == (0, [])


def brute_vc(n, edges):
    for k in range(n + 1):
        for sub in itertools.combinations(range(n), k):
            s = set(sub)
            if all(u in s or v in s for u, v in edges):
                return k


def test_min_vertex_cover_matches_exhaustive():
    rnd = random.Random(6)
    for _ in range(150):
        n = rnd.randint(2, 14)
        edges = list({tuple(sorted(rnd.sample(range(n), 2))) for _ in range(rnd.randint(0, 3 * n))})
        size, cover = min_vertex_cover(edges)
        assert is_vertex_cover(edges, cover) and len(cover) == size
        assert size == brute_vc(n, edges)


def test_min_vertex_cover_budget():
    # a perfect matching of 30 edges in one path needs 15 per component
    path = [(i, i + 1) for i in range(40)]
    with pytest.raises(ScaleExceeded):
        min_vertex_cover(path, budget=10)
    assert min_vertex_cover(path)[0] == 20


def test_delta_opt_upper():
    inst = Instance.unit((1, 2, 3, 1, 2, 3), 3, Fraction(1, 2))
    assert delta_opt_upper(inst, reqs([(0, 1), (1, 2)])).opt_value == 0
    rnd = random.Random(2)
    for _ in range(30):
        c0 = [1 + (i % 4) for i in range(24)]
        rnd.shuffle(c0)
        inst = Instance.unit(c0, 4, Fraction(1, 2))
        seq = random_sequence(24, "delta_safe", rnd, m=30, max_degree=2).requests
        rep = delta_opt_upper(inst, seq)
        col = rep.certificate
        assert all(col[r.u] != col[r.v] for r in seq)
        counts = [col.count(i) for i in range(1, 5)]
        assert max(counts) - min(counts) <= 1
        assert rep.opt_value == sum(a != b for a, b in zip(col, c0)) <= 24
