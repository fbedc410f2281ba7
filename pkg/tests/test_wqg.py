import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodic_homology.builder import build_window, template_from_wqg
from periodic_homology.cell_complex import homology
from periodic_homology.errors import DimensionMismatch, InfiniteComponents, InvalidPath, NotACycle, ParseError, UnknownVertex
from periodic_homology.lattice import INFINITE, IntegerLattice
from periodic_homology.wqg import (
    CycleClass,
    Edge,
    EdgePath,
    WeightedQuotientGraph,
    betti0_periodic,
    classify_quotient_cycle,
    construct_generators,
    corollary_betti,
    h1_generator_count,
    lift_path,
    lifted_boundary,
    parse_wqg,
    path_weight,
    spanning_forest,
    weight_lattice,
)

from conftest import load_wqg

P1 = EdgePath.from_word("f12^-1 e12")
P2 = EdgePath.from_word("f13^-1 e23 e12")
L1 = EdgePath.from_word("e13^-1 e23 e12")
L2 = EdgePath.from_word("e13^-1 f23 e12")


def lone_vertex():
    return parse_wqg('{"d": 1, "vertices": ["v"], "edges": []}')


def single_loop():
    return parse_wqg('{"d": 1, "vertices": ["v"], "edges": [{"id": "e", "tail": "v", "head": "v", "weight": [1]}]}')


def test_parse_kagome(kagome):
    assert (kagome.nu, kagome.epsilon, kagome.d) == (3, 6, 2)


def test_parse_lone_vertex():
    Q = lone_vertex()
    assert Q.nu == 1 and Q.epsilon == 0


def test_parse_errors():
    with pytest.raises(DimensionMismatch):
        parse_wqg('{"d": 2, "vertices": ["v"], "edges": [{"id": "e", "tail": "v", "head": "v", "weight": [1, 0, 0]}]}')
    with pytest.raises(UnknownVertex):
        parse_wqg('{"d": 1, "vertices": ["v"], "edges": [{"id": "e", "tail": "v", "head": "w", "weight": [1]}]}')
    with pytest.raises(ParseError):
        parse_wqg('{"d": 1, "vertices": ["v"], "edges": [{"id": "e"}]}')
    with pytest.raises(ParseError):
        parse_wqg("not json")


def test_direction_normalized_and_weight_negated():
    Q = WeightedQuotientGraph(1, ("a", "b"), (Edge("e", "b", "a", (3,)),))
    e = Q.edge("e")
    assert (e.tail, e.head, e.weight) == ("a", "b", (-3,))


def test_path_weights(kagome):
    assert path_weight(kagome, P1) == (0, 1)
    assert path_weight(kagome, P2) == (1, 0)
    assert path_weight(kagome, L1) == (0, 0)
    assert path_weight(kagome, L2) == (-1, 1)
    assert path_weight(kagome, P2.then(P2.inverse())) == (0, 0)


def test_invalid_path(kagome):
    with pytest.raises(InvalidPath):
        path_weight(kagome, EdgePath.from_word("e23 e13"))
    with pytest.raises(InvalidPath):
        path_weight(kagome, EdgePath(()))


def test_path_word_roundtrip():
    assert EdgePath.from_word(P2.word()).steps == P2.steps


def test_weight_lattices():
    assert load_wqg("kagome") and all(W.same_lattice(IntegerLattice.full(2)) for W in weight_lattice(load_wqg("kagome")))
    Ws = weight_lattice(load_wqg("interwoven_D"))
    assert len(Ws) == 2 and all(W.same_lattice(IntegerLattice.full(3)) for W in Ws)
    (W,) = weight_lattice(single_loop())
    assert W.same_lattice(IntegerLattice.full(1))


def test_betti0():
    assert betti0_periodic(load_wqg("kagome")) == 1
    assert betti0_periodic(load_wqg("interwoven_B")) == 2
    assert betti0_periodic(lone_vertex()) == INFINITE


def test_h1_counts():
    assert h1_generator_count(load_wqg("kagome")) == 3
    assert h1_generator_count(load_wqg("interwoven_B")) == 3
    assert h1_generator_count(load_wqg("interwoven_D")) == 6
    with pytest.raises(InfiniteComponents):
        h1_generator_count(lone_vertex())


def test_kagome_walkthrough(kagome):
    # the spanning tree {e12, e23} used in the worked example
    report = construct_generators(kagome, tree=("e12", "e23"))
    (comp,) = report.components
    assert [r.path.steps for r in comp.p] == [P1.steps, P2.steps]
    assert comp.ell[0].path.steps == L1.steps and comp.ell[0].weight == (0, 0)
    kinds = [g.kind for g in report.generators]
    assert kinds == ["commutator", "shortcut", "shortcut"]
    comm = report.generators[0].path
    assert comm.word() == "e12^-1 e23^-1 f13 e12^-1 f12 f13^-1 e23 e12 f12^-1 e12"
    assert report.generators[1].N == 1
    assert comp.coset_representatives == [(0, 0)]


def test_default_tree_is_bfs(kagome):
    forest = spanning_forest(kagome)
    assert forest.tree_edges == ("e12", "e13")
    report = construct_generators(kagome)
    assert [g.path for g in report.generators if g.kind == "shortcut"][0].steps == L1.inverse().steps


def test_interwoven_b_commutators():
    report = construct_generators(load_wqg("interwoven_B"))
    assert [g.kind for g in report.generators] == ["commutator"] * 3
    assert [g.of for g in report.generators] == [("p1", "p2"), ("p1", "p3"), ("p2", "p3")]
    assert len(report.components[0].coset_representatives) == 2


def test_single_loop_has_no_h1():
    report = construct_generators(single_loop())
    assert report.generators == []
    assert h1_generator_count(single_loop()) == 0


def test_corollary_examples():
    B, D = load_wqg("interwoven_B"), load_wqg("interwoven_D")
    for n in [(1, 2, 3), (2, 2, 2), (3, 1, 1)]:
        b0 = (3 + (-1) ** (n[0] + n[1] + n[0] * n[1])) // 2
        assert corollary_betti(B, n) == (b0, 2 * math.prod(n) + b0)
        assert corollary_betti(D, n) == (2, 4 * math.prod(n) + 2)
    assert corollary_betti(load_wqg("kagome"), (1, 1)) == (1, 4)
    assert homology(build_window(template_from_wqg(load_wqg("kagome")), (1, 1)).complex).betti == [1, 4]


def test_classify(kagome):
    assert classify_quotient_cycle(kagome, L1) is CycleClass.LIFTABLE
    assert classify_quotient_cycle(kagome, P1) is CycleClass.TOROIDAL
    assert classify_quotient_cycle(kagome, EdgePath((), "v2")) is CycleClass.LIFTABLE
    with pytest.raises(NotACycle):
        classify_quotient_cycle(kagome, EdgePath.from_word("e12"))


# ------------------------------------------------------------ properties


@st.composite
def graphs(draw, connected_rank=False):
    d = draw(st.integers(1, 3))
    nu = draw(st.integers(1, 3))
    vertices = [f"v{i}" for i in range(nu)]
    m = draw(st.integers(0, 5))
    edges = []
    for k in range(m):
        a = draw(st.sampled_from(vertices))
        b = draw(st.sampled_from(vertices))
        w = tuple(draw(st.integers(-2, 2)) for _ in range(d))
        edges.append(Edge(f"e{k}", a, b, w))
    if connected_rank:
        # add a loop in every direction at v0 and a path through all vertices
        for i in range(d):
            edges.append(Edge(f"x{i}", "v0", "v0", tuple(int(i == j) for j in range(d))))
        for i in range(1, nu):
            edges.append(Edge(f"t{i}", vertices[i - 1], vertices[i], (0,) * d))
    return WeightedQuotientGraph(d, tuple(vertices), tuple(edges))


def random_tree(Q, rng):
    """A spanning forest from Kruskal on a shuffled edge list."""
    parent = {v: v for v in Q.vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    tree = []
    edges = list(Q.edges)
    rng.shuffle(edges)
    for e in edges:
        a, b = find(e.tail), find(e.head)
        if a != b:
            parent[a] = b
            tree.append(e.id)
    return tree


@settings(max_examples=60, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_weight_lattice_independent_of_tree(Q, rng):
    base = weight_lattice(Q)
    other = weight_lattice(Q, tree=random_tree(Q, rng))
    assert len(base) == len(other)
    assert all(a.same_lattice(b) for a, b in zip(base, other))


@settings(max_examples=40, deadline=None)
@given(graphs(), st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_corollary_matches_window_homology(Q, sizes):
    n = tuple(sizes[: Q.d])
    if math.prod(n) > 64:
        return
    b0, b1 = corollary_betti(Q, n)
    betti = homology(build_window(template_from_wqg(Q), n).complex).betti
    betti = (betti + [0, 0])[:2]
    assert betti == [b0, b1]
    assert b0 - b1 == (Q.nu - Q.epsilon) * math.prod(n)


@settings(max_examples=40, deadline=None)
@given(graphs(connected_rank=True), st.randoms(use_true_random=False))
def test_generator_relations_and_lifts(Q, rng):
    report = construct_generators(Q)
    assert len(report.generators) == h1_generator_count(Q)
    for g in report.generators:
        start, end = Q.walk(g.path)
        assert start == end
        assert path_weight(Q, g.path) == (0,) * Q.d
        assert lifted_boundary(Q, lift_path(Q, g.path)) == {}
        if g.kind == "shortcut":
            comp = report.components[g.component]
            ell = next(r for r in comp.ell if r.name == g.of[0])
            lhs = tuple(g.N * x for x in ell.weight)
            rhs = [0] * Q.d
            for c, r in zip(g.c, comp.p):
                rhs = [a + c * b for a, b in zip(rhs, r.weight)]
            for c, r in zip(g.d, comp.ell):
                rhs = [a + c * b for a, b in zip(rhs, r.weight)]
            assert lhs == tuple(rhs)
            # N is the smallest positive multiple landing in the earlier lattice
            prior = IntegerLattice(Q.d, tuple(r.weight for r in comp.p) + tuple(r.weight for r in comp.ell[: comp.ell.index(ell)]))
            assert all(not prior.contains(tuple(k * x for x in ell.weight)) for k in range(1, g.N))


@settings(max_examples=40, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_path_weight_is_a_homomorphism(Q, rng):
    if not Q.edges:
        return
    # random walk
    v = Q.vertices[0]
    steps = []
    for _ in range(6):
        options = [(e.id, 1) for e in Q.edges if e.tail == v] + [(e.id, -1) for e in Q.edges if e.head == v]
        if not options:
            break
        eid, s = rng.choice(options)
        steps.append((eid, s))
        e = Q.edge(eid)
        v = e.head if s > 0 else e.tail
    if not steps:
        return
    p = EdgePath(tuple(steps))
    k = rng.randint(0, len(steps))
    a, b = EdgePath(p.steps[:k], Q.vertices[0]), EdgePath(p.steps[k:], None)
    if not b.steps:
        b = EdgePath((), v)
    wa, wb = path_weight(Q, a), path_weight(Q, b)
    assert path_weight(Q, p) == tuple(x + y for x, y in zip(wa, wb))
    assert path_weight(Q, p.inverse()) == tuple(-x for x in path_weight(Q, p))
