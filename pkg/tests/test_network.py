import random
from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from squaretile.exactmath import PreconditionError
from squaretile.network import (NetworkError, ResistorNetwork, bareiss_det, effective_resistance,
                                lower_bound_check, network_to_tiling, solve_kirchhoff,
                                spanning_tree_count, tiling_to_network)
from squaretile.oracle import enumerate_spanning_trees
from squaretile.tiler import PlacedSquare, Tiling, epsilon_tile, greedy_tile, kenyon_tile


def fraction_det(rows):
    """Reference determinant: plain Gaussian elimination over Fractions."""
    m = [[F(x) for x in r] for r in rows]
    n, det = len(m), F(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            for k in range(c, n):
                m[r][k] -= f * m[c][k]
    return det


def test_three_by_two_greedy_network():
    t = greedy_tile(3, 2)  # 3 wide, 2 tall
    g = tiling_to_network(t)
    assert len(g.vertices) == 3 and len(g.edges) == 3
    assert effective_resistance(g) == F(2, 3)
    assert spanning_tree_count(g) == 3
    assert spanning_tree_count(g, glue_poles=True) == 2
    sol = solve_kirchhoff(g, 2, 0)  # potentials equal to heights
    assert sorted(sol.currents) == [1, 1, 2] and sol.net_current == 3


def test_currents_are_square_sides():
    t, _ = kenyon_tile(55, 89)
    g = tiling_to_network(t)
    sol = solve_kirchhoff(g, t.height, 0)
    assert sol.currents == [s.side for s in t.squares]
    assert sol.net_current == t.width


def test_unit_square_network():
    g = tiling_to_network(greedy_tile(1, 1))
    assert effective_resistance(g) == 1
    assert spanning_tree_count(g) == spanning_tree_count(g, glue_poles=True) == 1


def test_incomplete_tiling_rejected():
    partial = epsilon_tile(F(577, 100), F(1, 10))
    assert partial.residual is not None
    with pytest.raises(PreconditionError):
        tiling_to_network(partial)
    with pytest.raises(PreconditionError):
        tiling_to_network(Tiling(2, 1, [PlacedSquare(0, 0, 1)]))


@given(st.integers(1, 60), st.integers(1, 60))
def test_resistance_identity_greedy(w, h):
    g = tiling_to_network(greedy_tile(w, h))
    r = effective_resistance(g)
    kappa, kappa_ab = spanning_tree_count(g), spanning_tree_count(g, glue_poles=True)
    assert r == F(h, w) == F(kappa_ab, kappa)
    # r = kappa_ab / kappa forces kappa to be a multiple of r's denominator
    assert w // gcd(w, h) <= kappa <= 2 ** len(g.edges)


@given(st.tuples(st.integers(1, 150), st.integers(2, 150)).filter(lambda pq: pq[0] < pq[1]))
def test_resistance_identity_kenyon(pq):
    p, q = pq
    t, _ = kenyon_tile(p, q)
    g = tiling_to_network(t)
    assert effective_resistance(g) == F(p, q)
    assert F(spanning_tree_count(g, glue_poles=True), spanning_tree_count(g)) == F(p, q)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=5, max_size=5), min_size=5, max_size=5))
def test_bareiss_matches_reference(rows):
    assert bareiss_det(rows) == fraction_det(rows)
    assert bareiss_det([]) == 1


def random_multigraph(rng, max_edges=8):
    n = rng.randint(2, 5)
    m = rng.randint(1, max_edges)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
    return ResistorNetwork(list(range(n)), edges, 0, 1)


def test_small_graph_examples():
    tri = ResistorNetwork(["a", "m", "b"], [("a", "b"), ("a", "m"), ("m", "b")], "a", "b")
    assert spanning_tree_count(tri) == enumerate_spanning_trees(tri) == 3
    one = ResistorNetwork(["a", "b"], [("a", "b")], "a", "b")
    assert spanning_tree_count(one) == enumerate_spanning_trees(one) == 1
    two = ResistorNetwork(["a", "b"], [("a", "b"), ("a", "b")], "a", "b")
    assert spanning_tree_count(two) == enumerate_spanning_trees(two) == 2
    assert effective_resistance(two) == F(1, 2)
    assert effective_resistance(tri) == F(2, 3)


def test_matrix_tree_equals_enumeration_random():
    rng = random.Random(11)
    for _ in range(100):
        g = random_multigraph(rng)
        assert spanning_tree_count(g) == enumerate_spanning_trees(g)


def test_disconnected_network():
    g = ResistorNetwork([0, 1, 2, 3], [(0, 2), (1, 3)], 0, 1)
    with pytest.raises(NetworkError):
        effective_resistance(g)
    assert spanning_tree_count(g) == 0


def test_network_validation():
    with pytest.raises(NetworkError):
        ResistorNetwork([0, 1], [(0, 1)], 0, 0)
    with pytest.raises(NetworkError):
        ResistorNetwork([0, 1], [(0, 5)], 0, 1)


def test_json_round_trip():
    g = tiling_to_network(greedy_tile(8, 5))
    back = ResistorNetwork.from_json(g.to_json())
    assert back == g


def test_lower_bound_examples():
    assert not lower_bound_check(1, 5, 4).passed  # four squares cannot tile 5 x 1
    rep = lower_bound_check(2, 3, 3)
    assert rep.passed and rep.ratio_margin == F(3, 2) and rep.log_margin == 5
    assert not lower_bound_check(100, 101, 6).passed  # 2^6 < 101
    with pytest.raises(PreconditionError):
        lower_bound_check(2, 4, 3)


@given(st.integers(1, 80), st.integers(1, 80))
def test_round_trip_greedy(w, h):
    t = greedy_tile(w, h)
    g = tiling_to_network(t)
    back = network_to_tiling(g)
    g2 = tiling_to_network(back)
    assert len(g2.edges) == len(g.edges)
    assert effective_resistance(g2) == effective_resistance(g)
    assert F(back.height, back.width) == F(h, w)


def test_round_trip_reproduces_primitive_tiling():
    t, _ = kenyon_tile(144, 233)
    back = network_to_tiling(tiling_to_network(t))
    assert sorted((s.x, s.y, s.side) for s in back.squares) == sorted((s.x, s.y, s.side) for s in t.squares)


def test_bad_rotation_is_rejected():
    g = tiling_to_network(greedy_tile(8, 5))
    v = max(g.rotation, key=lambda k: len(g.rotation[k]))
    order = g.rotation[v]
    scrambled = dict(g.rotation)
    scrambled[v] = order[1:2] + order[:1] + order[2:]
    bad = ResistorNetwork(g.vertices, g.edges, g.a, g.b, scrambled)
    with pytest.raises(NetworkError):
        network_to_tiling(bad)
    with pytest.raises(PreconditionError):
        network_to_tiling(ResistorNetwork(g.vertices, g.edges, g.a, g.b))
