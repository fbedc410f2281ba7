import random

import pytest

from periodic_homology.builder import build_window, covering_projection
from periodic_homology.cell_complex import (
    ChainMap,
    FiniteCellComplex,
    class_membership,
    euler_characteristic,
    homology,
    induced_map,
    matrix_rank,
    span_rank_modulo_boundaries,
)
from periodic_homology.errors import InvalidComplex, NotAChainMap, NotACycle
from periodic_homology.linalg import PrimeField

from conftest import load_template
from oracles import betti_by_rank

GF = PrimeField(46337)


def point():
    return FiniteCellComplex.from_faces([["v"]], {})


def circle():
    return FiniteCellComplex.from_faces([["u", "v"], ["a", "b"]], {"a": {"v": 1, "u": -1}, "b": {"u": 1, "v": -1}})


def test_point():
    assert homology(point()).betti == [1]
    assert euler_characteristic(point()) == 1


def test_torus_window():
    X = build_window(load_template("torus"), (1, 1)).complex
    assert homology(X).betti == [1, 2, 1] == betti_by_rank(X)
    assert euler_characteristic(X) == 0


def test_planes_window_x4():
    X = build_window(load_template("planes"), (4, 4, 4)).complex
    assert homology(X).betti == [1, 18, 17]
    assert euler_characteristic(X) == 0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_planes_euler_zero(n):
    assert euler_characteristic(build_window(load_template("planes"), (n,) * 3).complex) == 0


def test_invalid_boundary_square():
    with pytest.raises(InvalidComplex):
        FiniteCellComplex.from_faces(
            [["v", "w"], ["a"], ["f"]],
            {"a": {"v": 1, "w": -1}, "f": {"a": 1}},
        )


def test_face_index_out_of_range():
    with pytest.raises(InvalidComplex):
        FiniteCellComplex((("v",), ("e",)), (({},), ({3: 1},)))


def test_generators_are_independent_cycles():
    for name, n in [("torus", (2, 3)), ("planes", (2, 2, 2)), ("kagome", (2, 1))]:
        X = build_window(load_template(name), n).complex
        H = homology(X)
        for q, gens in enumerate(H.generators):
            for g in gens:
                assert X.boundary_of(g, q) == {}
            assert span_rank_modulo_boundaries(X, gens, q) == H.betti[q]


@pytest.mark.parametrize("name,n", [("torus", (3, 2)), ("planes", (3, 3, 3)), ("kagome", (2, 2)), ("interwoven_B", (2, 1, 2))])
def test_field_independence(name, n):
    X = build_window(load_template(name), n).complex
    betti = homology(X).betti
    assert homology(X, GF).betti == betti == betti_by_rank(X)
    assert sum((-1) ** q * b for q, b in enumerate(betti)) == euler_characteristic(X)


def test_characteristic_two_note():
    # projective plane: its torsion shows up only in characteristic 2
    X = FiniteCellComplex.from_faces([["v"], ["a"], ["f"]], {"a": {}, "f": {"a": 2}})
    assert homology(X).betti == [1, 0, 0]
    assert homology(X, PrimeField(2)).betti == [1, 1, 1]


def test_identity_induces_identity():
    X = circle()
    M = induced_map(ChainMap.identity(X), 1)
    assert M == [[1]]


def test_point_into_circle():
    f = ChainMap(point(), circle(), (({0: 1},),))
    assert matrix_rank(induced_map(f, 0)) == 1


def test_not_a_chain_map():
    with pytest.raises(NotAChainMap):
        ChainMap(circle(), circle(), (({0: 1}, {1: 1}), ({0: 1}, {0: 1})))


def test_torus_projection_is_surjective_on_h1():
    T = load_template("torus")
    f = covering_projection(T, (2, 2), (1, 1))
    M = induced_map(f, 1)
    assert len(M) == 2 and matrix_rank(M) == 2


def test_class_membership():
    W = build_window(load_template("torus"), (1, 1))
    X = W.complex
    boundary = dict(X.boundary(2)[0])
    assert class_membership(X, boundary, [], 1)
    a = W.chain(1, {("a", (0, 0)): 1})
    b = W.chain(1, {("b", (0, 0)): 1})
    assert not class_membership(X, a, [b], 1)
    assert class_membership(X, a, [a], 1)
    with pytest.raises(NotACycle):
        class_membership(build_window(load_template("torus"), (2, 2)).complex, {0: 1}, [], 1)


def test_coordinates_roundtrip():
    X = build_window(load_template("planes"), (2, 2, 2)).complex
    H = homology(X)
    rng = random.Random(3)
    coeffs = [rng.randint(-3, 3) for _ in H.generators[1]]
    z = {}
    for c, g in zip(coeffs, H.generators[1]):
        for i, a in g.items():
            z[i] = z.get(i, 0) + c * a
    for col in X.boundary(2)[:5]:
        for i, a in col.items():
            z[i] = z.get(i, 0) + 7 * a
    assert H.coordinates(z, 1) == coeffs
