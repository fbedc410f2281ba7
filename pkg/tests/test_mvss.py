import math
import random
from math import comb

import pytest

from periodic_homology.builder import build_window, patch_in_window
from periodic_homology.cell_complex import FiniteCellComplex, homology
from periodic_homology.errors import ArityOverflow, ClassNotFound, InsufficientData, InvalidComplex, NotACycle
from periodic_homology.linalg import PrimeField
from periodic_homology.mvss import (
    Lift,
    blowup,
    build_cover,
    compute_pages,
    explicit_cover,
    filtration_level,
    local_e1_dims,
    nerve,
    projection_image_proxy,
    reconstruct_homology,
    run_mvss,
    scaling_fit,
    toroidal_candidate_count,
    toroidal_report,
    total_complex_check,
)

from conftest import load_template


@pytest.fixture(scope="module")
def planes4():
    return run_mvss(load_template("planes"), (4, 4, 4))


def interval():
    # a - b - c, covered by its two edges
    return FiniteCellComplex.from_faces([["a", "b", "c"], ["ab", "bc"]], {"ab": {"b": 1, "a": -1}, "bc": {"c": 1, "b": -1}})


def test_cover_sizes(planes, torus):
    C = build_cover(build_window(planes, (4, 4, 4)))
    assert len(C.elements) == 64
    assert {tuple(s) for s in C.element_sizes()} == {(8, 12, 4)}
    assert len(build_cover(build_window(torus, (1, 1))).elements) == 1
    assert len(build_cover(build_window(load_template("kagome"), (2, 2))).elements) == 4


def test_cover_must_cover_and_be_closed():
    X = interval()
    with pytest.raises(InvalidComplex):
        explicit_cover(X, [{0: [0, 1], 1: [0]}])
    with pytest.raises(InvalidComplex):
        explicit_cover(X, [{0: [0], 1: [0]}, {0: [1, 2], 1: [1]}])


def test_nerve_of_two_overlapping_pieces():
    C = explicit_cover(interval(), [{0: [0, 1], 1: [0]}, {0: [1, 2], 1: [1]}])
    N = nerve(C)
    assert N.simplices == ((0,), (1,), (0, 1))
    assert N.intersections[(0, 1)] == {0: (1,)}
    S = compute_pages(blowup(C, N))
    assert S.e_infinity == {(0, 0): 1}
    assert S.pages[1] == {(0, 0): 2, (1, 0): 1}


def test_single_element_nerve(torus):
    C = build_cover(build_window(torus, (1, 1)))
    N = nerve(C)
    assert N.simplices == ((0,),)
    S = compute_pages(blowup(C, N))
    assert S.e_infinity == {(0, 0): 1, (0, 1): 2, (0, 2): 1}


def test_nerve_arity(planes):
    C = build_cover(build_window(planes, (4, 4, 4)))
    assert nerve(C).top_arity == 8
    with pytest.raises(ArityOverflow):
        nerve(C, max_arity=4)


@pytest.mark.parametrize("name,n", [("torus", (2, 2)), ("kagome", (2, 3)), ("planes", (2, 2, 2)), ("circle", (3,))])
def test_blowup_dims_by_enumeration(name, n):
    T = load_template(name)
    W = build_window(T, n)
    B = blowup(build_cover(W))
    # count, per cell, how many translated patches hold it
    shifts = [tuple(t) for t in B.cover.labels]
    owners = [[0] * W.complex.count(q) for q in range(W.complex.dimension + 1)]
    for t in shifts:
        for q, cells in patch_in_window(W, t).items():
            for j in cells:
                owners[q][j] += 1
    expected = {}
    for q, level in enumerate(owners):
        for m in level:
            for p in range(m):
                expected[(p, q)] = expected.get((p, q), 0) + comb(m, p + 1)
    assert B.dims() == expected


def test_point_template():
    S = run_mvss(load_template("point"), (3,)).state
    assert S.pages[0] == {(0, 0): 3}
    assert S.e_infinity == {(0, 0): 3}


@pytest.mark.parametrize("name,n", [("torus", (2, 2)), ("kagome", (2, 2)), ("circle", (4,)), ("interwoven_B", (2, 1, 1))])
def test_pages_small(name, n):
    R = run_mvss(load_template(name), n)
    S = R.state
    S.check_pages()
    assert S.pages[1] == local_e1_dims(R.blowup)
    assert all(R.total_check)
    assert R.reconstruction.diagonal_sums == R.direct.betti
    assert S.verify_differentials() > 0


def test_planes_n2_differentials():
    R = run_mvss(load_template("planes"), (2, 2, 2))
    assert R.state.verify_differentials() > 1000
    assert R.state.pages[2].get((1, 1)) == 4


def test_pages_mod_p():
    R = run_mvss(load_template("planes"), (2, 2, 2), field=PrimeField(3))
    assert R.reconstruction.diagonal_sums == homology(R.window.complex, PrimeField(3)).betti


def test_render_and_json(torus):
    S = run_mvss(torus, (2, 2)).state
    doc = S.to_json()
    assert doc["stabilization_index"] == S.last_page
    assert "q=0" in S.render(0)


def plane_chain(W, cid, fixed_axis, value):
    n = W.n
    terms = {}
    for a in range(n[0]):
        for b in range(n[1]):
            for c in range(n[2]):
                t = (a, b, c)
                if t[fixed_axis] == value:
                    terms[(cid, t)] = 1
    return W.chain(2, terms)


def test_filtration_levels(planes4):
    R = planes4
    W, S = R.window, R.state
    lift = Lift(S, R.reconstruction)
    line = W.chain(1, {("ex", (i, 0, 0)): 1 for i in range(4)})
    assert filtration_level(S, line, 1, lift) == 1
    assert filtration_level(S, plane_chain(W, "syz", 0, 0), 2, lift) == 2
    square = W.complex.boundary(2)[W.index[2][("sxz", (1, 1, 1))]]
    assert filtration_level(S, square, 1, lift) == 0
    assert filtration_level(S, {}, 1, lift) == 0
    with pytest.raises(NotACycle):
        filtration_level(S, W.chain(1, {("ex", (0, 0, 0)): 1}), 1, lift)


def test_filtration_level_invariance(planes4):
    R = planes4
    W, S, X = R.window, R.state, R.window.complex
    lift = Lift(S, R.reconstruction)
    rng = random.Random(7)
    line = W.chain(1, {("ex", (i, 2, 3)): 1 for i in range(4)})
    level0 = [g for g, p in zip(R.reconstruction.generators[1], R.reconstruction.levels[1]) if p == 0]
    for _ in range(10):
        z = {i: 3 * a for i, a in line.items()}
        for g in rng.sample(level0, 3):
            c = rng.randint(-2, 2)
            for i, a in g.items():
                z[i] = z.get(i, 0) + c * a
        for j in rng.sample(range(X.count(2)), 5):
            c = rng.randint(-3, 3)
            for i, a in X.boundary(2)[j].items():
                z[i] = z.get(i, 0) + c * a
        z = {i: a for i, a in z.items() if a}
        assert filtration_level(S, z, 1, lift) == 1


def test_level_counts(planes4):
    rep = toroidal_report(planes4.state, planes4.reconstruction, planes4.window.labels)
    assert rep.counts[1] == {0: 15, 1: 3}
    assert rep.counts[2] == {1: 15, 2: 2}
    doc = rep.to_json(max_generators=2)
    assert doc["degrees"][1]["toroidal_candidates"] == 3
    assert doc["degrees"][1]["truncated"] == 16


def test_lift_rejects_degree_without_homology(torus):
    R = run_mvss(torus, (1, 1))
    lift = Lift(R.state, R.reconstruction)
    with pytest.raises(ClassNotFound):
        lift.coordinates({}, 5)


@pytest.mark.parametrize("name,n", [("torus", (2, 2)), ("planes", (2, 2, 2)), ("planes", (3, 3, 3)), ("kagome", (3, 2))])
def test_toroidal_count_matches_e_infinity(name, n):
    T = load_template(name)
    R = run_mvss(T, n, total_check=False)
    for k in range(len(R.direct.betti)):
        b, t = toroidal_candidate_count(T, n, k)
        assert b == R.direct.betti[k]
        assert t == b - R.state.e_infinity.get((0, k), 0)


def test_projection_proxy(torus, planes):
    rows = projection_image_proxy(torus, (2, 2), (1, 1))
    assert [r["cokernel"] for r in rows] == [0, 0, 0]
    rows = projection_image_proxy(planes, (4, 4, 4), (2, 2, 2))
    assert rows[2]["rank"] == 5
    same = projection_image_proxy(torus, (2, 2), (2, 2))
    assert all(r["rank"] == r["target_betti"] for r in same)


def test_scaling_errors(planes):
    with pytest.raises(InsufficientData):
        scaling_fit(planes, [2, 3], 2)
    with pytest.raises(ValueError):
        scaling_fit(planes, [3, 2, 4], 2)


def test_scaling_torus(torus):
    with pytest.warns(UserWarning):
        rep = scaling_fit(torus, [2, 3, 4], 1)
    assert rep.betti == [2, 2, 2]
    assert rep.betti_exponent == pytest.approx(0.0, abs=1e-9)
    assert rep.betti_within_bound
