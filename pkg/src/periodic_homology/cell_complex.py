"""Finite chain complexes over an exact field.

A ``FiniteCellComplex`` stores integer boundary matrices as sparse columns;
the coefficient field is chosen when homology is computed, so the same
complex can be analysed over Q and over GF(p).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Mapping, Sequence

from .errors import InvalidComplex, NotAChainMap, NotACycle
from .linalg import QQ, EchelonBasis, apply, reduce_matrix, to_field

Chain = dict  # cell index -> coefficient


def _compose_is_zero(outer: Sequence[Mapping], inner: Sequence[Mapping]) -> tuple[int, dict] | None:
    for j, col in enumerate(inner):
        acc: dict = {}
        for k, a in col.items():
            for i, b in outer[k].items():
                acc[i] = acc.get(i, 0) + a * b
        bad = {i: v for i, v in acc.items() if v}
        if bad:
            return j, bad
    return None


@dataclass(frozen=True, eq=False)
class FiniteCellComplex:
    """Graded cells plus integer boundary columns.

    ``boundaries[q][j]`` is the boundary of the j-th q-cell as a sparse map
    from (q-1)-cell indices to integer coefficients; ``boundaries[0]`` holds
    empty columns.
    """

    cells: tuple[tuple[Hashable, ...], ...]
    boundaries: tuple[tuple[dict, ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.boundaries):
            raise InvalidComplex("one boundary list per dimension is required")
        for q, (labels, cols) in enumerate(zip(self.cells, self.boundaries)):
            if len(labels) != len(cols):
                raise InvalidComplex(f"dimension {q}: {len(labels)} cells but {len(cols)} columns")
            if q == 0 and any(cols):
                raise InvalidComplex("0-cells must have empty boundary")
            if q > 0:
                size = len(self.cells[q - 1])
                for j, col in enumerate(cols):
                    if any(not 0 <= i < size for i in col):
                        raise InvalidComplex(f"cell {labels[j]!r} has a face index out of range")
        for q in range(2, len(self.cells)):
            bad = _compose_is_zero(self.boundaries[q - 1], self.boundaries[q])
            if bad is not None:
                j, _ = bad
                raise InvalidComplex(f"boundary of boundary of {self.cells[q][j]!r} is nonzero")

    @classmethod
    def from_faces(cls, cells: Sequence[Sequence[Hashable]], faces: Mapping[Hashable, Mapping[Hashable, int]]):
        """Build from labels per dimension and a label -> {face label: coeff} map."""
        cells = tuple(tuple(c) for c in cells)
        index = [{lab: i for i, lab in enumerate(level)} for level in cells]
        boundaries = []
        for q, level in enumerate(cells):
            cols = []
            for lab in level:
                col: dict = {}
                for face, coeff in faces.get(lab, {}).items():
                    if q == 0:
                        raise InvalidComplex(f"0-cell {lab!r} has faces")
                    i = index[q - 1][face]
                    col[i] = col.get(i, 0) + coeff
                cols.append({i: v for i, v in col.items() if v})
            boundaries.append(tuple(cols))
        return cls(cells, tuple(boundaries))

    @property
    def dimension(self) -> int:
        return len(self.cells) - 1

    def count(self, q: int) -> int:
        return len(self.cells[q]) if 0 <= q < len(self.cells) else 0

    def boundary(self, q: int) -> tuple[dict, ...]:
        if q <= 0 or q >= len(self.cells):
            return tuple({} for _ in range(self.count(q)))
        return self.boundaries[q]

    def boundary_of(self, chain: Mapping, q: int, field=QQ) -> dict:
        return apply(self.boundary(q), to_field(chain, field), field)


@dataclass
class HomologyResult:
    """Betti numbers plus a generating cycle per class, for one field."""

    complex: FiniteCellComplex
    field: object
    betti: list[int]
    generators: list[list[dict]]
    boundary_bases: list[list[dict]] = field(repr=False)

    @cached_property
    def _coordinate_bases(self) -> list[EchelonBasis]:
        bases = []
        for q, gens in enumerate(self.generators):
            basis = EchelonBasis(self.field, track=True)
            for b in self.boundary_bases[q]:
                basis.add(b, tag=None)
            for i, g in enumerate(gens):
                if not basis.add(g, tag=i):
                    raise InvalidComplex("homology generators are dependent modulo boundaries")
            bases.append(basis)
        return bases

    def coordinates(self, z: Mapping, q: int) -> list | None:
        """Coordinates of the class of cycle z in the generator basis.

        Returns None when z is not a cycle modulo boundaries combination of
        the generators (which cannot happen for genuine cycles).
        """
        coords = self._coordinate_bases[q].coordinates(to_field(z, self.field))
        if coords is None:
            return None
        return [coords.get(i, 0) for i in range(self.betti[q])]

    def is_boundary(self, z: Mapping, q: int) -> bool:
        basis = EchelonBasis(self.field, track=False)
        for b in self.boundary_bases[q]:
            basis.add(b)
        return basis.contains(to_field(z, self.field))


def homology(X: FiniteCellComplex, field=QQ) -> HomologyResult:
    """Betti numbers and generators via column reduction with clearing.

    A q-cell j whose column of d_q reduces to zero, and which is not the
    leading row of a reduced column of d_{q+1}, contributes the generator
    obtained from its transform vector.
    """
    top = X.dimension
    betti: list[int] = [0] * (top + 1)
    generators: list[list[dict]] = [[] for _ in range(top + 1)]
    boundary_bases: list[list[dict]] = [[] for _ in range(top + 1)]
    cleared: set[int] = set()
    for q in range(top, -1, -1):
        cols = X.boundary(q)
        order = [j for j in range(len(cols)) if j not in cleared]
        reduced, transform, _ = reduce_matrix(list(cols), field, order=order)
        next_cleared: set[int] = set()
        if q > 0:
            for j in order:
                if reduced[j]:
                    next_cleared.add(max(reduced[j]))
                    boundary_bases[q - 1].append(reduced[j])
        gens = [transform[j] for j in order if not reduced[j]]
        generators[q] = gens
        betti[q] = len(gens)
        cleared = next_cleared
    return HomologyResult(X, field, betti, generators, boundary_bases)


def betti_numbers(X: FiniteCellComplex, field=QQ) -> list[int]:
    return homology(X, field).betti


def euler_characteristic(X: FiniteCellComplex) -> int:
    return sum((-1) ** q * X.count(q) for q in range(X.dimension + 1))


@dataclass(frozen=True, eq=False)
class ChainMap:
    """``matrices[q][j]`` is the image of source q-cell j as a target chain."""

    source: FiniteCellComplex
    target: FiniteCellComplex
    matrices: tuple[tuple[dict, ...], ...]

    def __post_init__(self):
        for q in range(self.source.dimension + 1):
            if len(self.matrices[q]) != self.source.count(q):
                raise NotAChainMap(f"dimension {q}: wrong number of columns")
        for q in range(1, self.source.dimension + 1):
            for j in range(self.source.count(q)):
                lhs = _apply_int(self.target.boundary(q), self.matrices[q][j])
                rhs = _apply_int(self.matrices[q - 1], self.source.boundary(q)[j])
                if lhs != rhs:
                    raise NotAChainMap(f"map does not commute with boundary on cell {self.source.cells[q][j]!r}")

    def apply(self, chain: Mapping, q: int, field=QQ) -> dict:
        if q >= len(self.matrices):
            return {}
        return apply(self.matrices[q], to_field(chain, field), field)

    @classmethod
    def identity(cls, X: FiniteCellComplex) -> ChainMap:
        return cls(X, X, tuple(tuple({j: 1} for j in range(X.count(q))) for q in range(X.dimension + 1)))


def _apply_int(columns: Sequence[Mapping], x: Mapping) -> dict:
    out: dict = {}
    for j, a in x.items():
        for i, b in columns[j].items():
            out[i] = out.get(i, 0) + a * b
    return {i: v for i, v in out.items() if v}


def induced_map(
    f: ChainMap,
    q: int,
    field=QQ,
    source_homology: HomologyResult | None = None,
    target_homology: HomologyResult | None = None,
) -> list[list]:
    """Matrix of H_q(f): rows index target generators, columns source ones."""
    hs = source_homology or homology(f.source, field)
    ht = target_homology or homology(f.target, field)
    if q > f.source.dimension:
        return [[] for _ in range(ht.betti[q] if q <= f.target.dimension else 0)]
    rows = ht.betti[q] if q <= f.target.dimension else 0
    matrix = [[0] * hs.betti[q] for _ in range(rows)]
    for j, g in enumerate(hs.generators[q]):
        image = f.apply(g, q, field)
        if not rows:
            continue
        coords = ht.coordinates(image, q)
        if coords is None:
            raise NotAChainMap("image of a cycle is not a cycle")
        for i, c in enumerate(coords):
            matrix[i][j] = c
    return matrix


def matrix_rank(matrix: list[list], field=QQ) -> int:
    basis = EchelonBasis(field, track=False)
    ncols = len(matrix[0]) if matrix else 0
    r = 0
    for j in range(ncols):
        col = {i: row[j] for i, row in enumerate(matrix) if row[j]}
        if basis.add(to_field(col, field)):
            r += 1
    return r


def class_membership(X: FiniteCellComplex, z: Mapping, subspace: Sequence[Mapping], q: int, field=QQ) -> bool:
    """True iff the cycle z lies in span(subspace) + B_q(X)."""
    for chain in [z, *subspace]:
        if X.boundary_of(chain, q, field):
            raise NotACycle(f"chain is not a {q}-cycle")
    basis = EchelonBasis(field, track=False)
    for col in X.boundary(q + 1):
        basis.add(to_field(col, field))
    for chain in subspace:
        basis.add(to_field(chain, field))
    return basis.contains(to_field(z, field))


def span_rank_modulo_boundaries(X: FiniteCellComplex, chains: Sequence[Mapping], q: int, field=QQ) -> int:
    """dim of (span(chains) + B_q) / B_q."""
    basis = EchelonBasis(field, track=False)
    for col in X.boundary(q + 1):
        basis.add(to_field(col, field))
    return sum(1 for chain in chains if basis.add(to_field(chain, field)))


def subcomplex(X: FiniteCellComplex, cells: Mapping[int, Sequence[int]]) -> tuple[FiniteCellComplex, list[list[int]]]:
    """Restrict X to a face-closed set of cells.

    Returns the subcomplex and, per dimension, the list mapping its cell
    indices back to X.
    """
    top = max((q for q, v in cells.items() if v), default=-1)
    keep = [sorted(cells.get(q, ())) for q in range(top + 1)]
    where = [{j: i for i, j in enumerate(level)} for level in keep]
    boundaries = []
    for q, level in enumerate(keep):
        cols = []
        for j in level:
            col = {}
            for i, a in X.boundary(q)[j].items():
                if i not in where[q - 1]:
                    raise InvalidComplex(f"cell {X.cells[q][j]!r} has a face outside the subcomplex")
                col[where[q - 1][i]] = a
            cols.append(col)
        boundaries.append(tuple(cols))
    labels = tuple(tuple(X.cells[q][j] for j in level) for q, level in enumerate(keep))
    return FiniteCellComplex(labels, tuple(boundaries)), keep


def push_forward(chain: Mapping[int, object], mapping: Sequence[int]) -> dict:
    return {mapping[i]: a for i, a in chain.items()}
