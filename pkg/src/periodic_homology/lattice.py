"""Exact integer lattice algebra: Smith normal form, indices and cosets in Z^d.

All arithmetic uses Python integers, so nothing overflows and nothing is
rounded.  Lattices are row spans: ``IntegerLattice(d, gens)`` is the set of
integer combinations of the rows in ``gens``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InfiniteIndex

INFINITE = math.inf


class IntegerMatrix:
    """Immutable dense matrix of Python ints."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]], cols: int | None = None):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if cols is None:
            if not rows:
                raise ValueError("column count is required for an empty matrix")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        self._data = rows
        self.rows = len(rows)
        self.cols = cols

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls(([int(i == j) for j in range(n)] for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntegerMatrix:
        return cls(([0] * cols for _ in range(rows)), cols=cols)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self._data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def transpose(self) -> IntegerMatrix:
        return IntegerMatrix(zip(*self._data), cols=self.rows) if self.rows else IntegerMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._data)) if other.rows else [()] * other.cols
        return IntegerMatrix(
            ([sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._data),
            cols=other.cols,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.shape, self._data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def determinant(self) -> int:
        """Bareiss fraction-free elimination; square matrices only."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.tolist()!r})"


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with U, V unimodular; ``V_inv`` is the inverse of V."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix
    V_inv: IntegerMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.diagonal if x != 0)


def _smallest_pivot(D: list[list[int]], t: int) -> tuple[int, int] | None:
    best = None
    for i in range(t, len(D)):
        row = D[i]
        for j in range(t, len(row)):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(A: IntegerMatrix | Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form by smallest-absolute-value pivoting.

    Ties between equal pivots are broken by (row, column) index so the
    transforms are deterministic.
    """
    if not isinstance(A, IntegerMatrix):
        A = IntegerMatrix(A)
    m, n = A.shape
    D = A.tolist()
    U = IntegerMatrix.identity(m).tolist()
    V = IntegerMatrix.identity(n).tolist()
    Vi = IntegerMatrix.identity(n).tolist()

    def swap_cols(M, a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]

    for t in range(min(m, n)):
        while True:
            pivot = _smallest_pivot(D, t)
            if pivot is None:
                break
            i, j = pivot
            if i != t:
                D[t], D[i] = D[i], D[t]
                U[t], U[i] = U[i], U[t]
            if j != t:
                swap_cols(D, t, j)
                swap_cols(V, t, j)
                Vi[t], Vi[j] = Vi[j], Vi[t]
            p = D[t][t]
            clean = True
            for r in range(t + 1, m):
                q = D[r][t] // p
                if q:
                    D[r] = [a - q * b for a, b in zip(D[r], D[t])]
                    U[r] = [a - q * b for a, b in zip(U[r], U[t])]
                if D[r][t]:
                    clean = False
            for c in range(t + 1, n):
                q = D[t][c] // p
                if q:
                    for row in D:
                        row[c] -= q * row[t]
                    for row in V:
                        row[c] -= q * row[t]
                    Vi[t] = [a + q * b for a, b in zip(Vi[t], Vi[c])]
                if D[t][c]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (r for r in range(t + 1, m) for c in range(t + 1, n) if D[r][c] % p),
                None,
            )
            if bad is None:
                break
            D[t] = [a + b for a, b in zip(D[t], D[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]

    return SmithDecomposition(
        U=IntegerMatrix(U, cols=m),
        D=IntegerMatrix(D, cols=n),
        V=IntegerMatrix(V, cols=n),
        V_inv=IntegerMatrix(Vi, cols=n),
    )


def _row_times(x: Sequence[int], M: IntegerMatrix) -> list[int]:
    return [sum(x[i] * M[i, j] for i in range(M.rows)) for j in range(M.cols)]


@dataclass(frozen=True)
class IntegerLattice:
    """Subgroup of Z^d spanned by the integer rows of ``generators``."""

    ambient_rank: int
    generators: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        if any(len(g) != self.ambient_rank for g in gens):
            raise ValueError(f"generators must have length {self.ambient_rank}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def full(cls, d: int) -> IntegerLattice:
        return cls(d, tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @cached_property
    def smith(self) -> SmithDecomposition:
        return smith_normal_form(IntegerMatrix(self.generators, cols=self.ambient_rank))

    @property
    def rank(self) -> int:
        return self.smith.rank

    def _factors(self) -> list[int]:
        """Smith diagonal padded to length d (zeros for missing directions)."""
        diag = list(self.smith.diagonal)
        return diag + [0] * (self.ambient_rank - len(diag))

    def index(self) -> int | float:
        """[Z^d : L], or ``INFINITE`` when L is rank deficient."""
        if self.rank < self.ambient_rank:
            return INFINITE
        return math.prod(self.smith.invariant_factors)

    def _smith_coordinates(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.ambient_rank:
            raise ValueError(f"vector must have length {self.ambient_rank}")
        return _row_times(x, self.smith.V)

    def order_of(self, x: Sequence[int]) -> int | float:
        """Smallest N > 0 with N*x in L (``INFINITE`` if none)."""
        z = self._smith_coordinates(x)
        N = 1
        for zi, di in zip(z, self._factors()):
            if di == 0:
                if zi != 0:
                    return INFINITE
                continue
            N = math.lcm(N, di // math.gcd(di, zi))
        return N

    def contains(self, x: Sequence[int]) -> bool:
        return self.order_of(x) == 1

    def solve(self, x: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coefficients y with sum(y_i * generators[i]) == x, or None."""
        z = self._smith_coordinates(x)
        m = len(self.generators)
        y = [0] * m
        for i, (zi, di) in enumerate(zip(z, self._factors())):
            if di == 0:
                if zi != 0:
                    return None
            elif zi % di:
                return None
            elif i < m:
                y[i] = zi // di
        return tuple(_row_times(y, self.smith.U)) if m else ()

    def coset_representatives(self) -> list[tuple[int, ...]]:
        """One vector per coset of L in Z^d, zero first.

        Representatives are a @ V^{-1} for a in the box prod [0, d_i).
        """
        if self.rank < self.ambient_rank:
            raise InfiniteIndex(f"lattice of rank {self.rank} in Z^{self.ambient_rank}")
        factors = self._factors()
        reps = []
        for a in itertools.product(*(range(f) for f in factors)):
            reps.append(tuple(_row_times(a, self.smith.V_inv)))
        return reps

    def same_coset(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.contains([a - b for a, b in zip(x, y)])

    def with_periods(self, n: Sequence[int]) -> IntegerLattice:
        """L + (n_1 Z x ... x n_d Z)."""
        if len(n) != self.ambient_rank:
            raise ValueError("period vector has wrong length")
        extra = tuple(
            tuple(int(i == j) * int(n[i]) for j in range(self.ambient_rank))
            for i in range(self.ambient_rank)
        )
        return IntegerLattice(self.ambient_rank, self.generators + extra)

    def index_mod(self, n: Sequence[int]) -> int:
        """Index of the image of L in the finite group prod Z/n_i."""
        if any(int(k) < 1 for k in n):
            raise ValueError("window sizes must be positive")
        return int(self.with_periods(n).index())

    def same_lattice(self, other: IntegerLattice) -> bool:
        return (
            self.ambient_rank == other.ambient_rank
            and all(other.contains(g) for g in self.generators)
            and all(self.contains(g) for g in other.generators)
        )


def subgroup_index(L: IntegerLattice) -> int | float:
    return L.index()


def coset_representatives(L: IntegerLattice) -> list[tuple[int, ...]]:
    return L.coset_representatives()


def index_mod(L: IntegerLattice, n: Sequence[int]) -> int:
    return L.index_mod(n)
