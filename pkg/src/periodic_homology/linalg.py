"""Exact sparse linear algebra over Q or a prime field.

Vectors are ``dict[int, scalar]`` holding only nonzero entries.  Elimination
is column based: every stored vector is keyed by its leading index (the
largest index with a nonzero entry, the "low" row in persistence
terminology), and new vectors are reduced against stored ones by clearing
their leading entry until it is either new or the vector vanishes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Vector = dict


class RationalField:
    """Exact rationals; values stay plain ints whenever they are integral."""

    characteristic = 0
    name = "rational"

    def coerce(self, x) -> int | Fraction:
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        return int(x)

    def div(self, a, b) -> int | Fraction:
        if b == 1:
            return a
        if b == -1:
            return -a
        q = Fraction(a) / b
        return q.numerator if q.denominator == 1 else q

    def axpy(self, y: dict, a, x: Mapping) -> None:
        """y += a * x in place."""
        get = y.get
        for k, v in x.items():
            s = get(k, 0) + a * v
            if s:
                if type(s) is Fraction and s.denominator == 1:
                    s = s.numerator
                y[k] = s
            else:
                del y[k]

    def scale(self, x: Mapping, a) -> dict:
        return {k: self.coerce(a * v) for k, v in x.items()} if a else {}

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "RationalField()"


class PrimeField:
    """Integers modulo a prime p, stored as ints in [0, p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p
        self.p = p
        self.name = f"GF({p})"

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def div(self, a, b) -> int:
        return a * pow(b, -1, self.p) % self.p

    def axpy(self, y: dict, a, x: Mapping) -> None:
        p = self.p
        get = y.get
        for k, v in x.items():
            s = (get(k, 0) + a * v) % p
            if s:
                y[k] = s
            else:
                del y[k]

    def scale(self, x: Mapping, a) -> dict:
        a %= self.p
        return {k: v * a % self.p for k, v in x.items()} if a else {}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


QQ = RationalField()


def field_from_spec(spec: str | int | None):
    """'rational' / None -> Q; an integer (or digit string) -> GF(p)."""
    if spec is None or spec in ("rational", "Q", "QQ"):
        return QQ
    return PrimeField(int(spec))


def to_field(vec: Mapping, field) -> dict:
    out = {}
    for k, v in vec.items():
        c = field.coerce(v)
        if c:
            out[k] = c
    return out


def add_vectors(field, *terms: tuple[object, Mapping]) -> dict:
    out: dict = {}
    for a, x in terms:
        field.axpy(out, a, x)
    return out


class EchelonBasis:
    """Incrementally built basis with distinct leading indices.

    Each stored vector remembers, when ``track`` is on, its expression as a
    combination of the tagged vectors that were inserted.  ``reduce``
    returns the residual of a query vector together with the combination
    that was added to it, so ``query + sum(c * inserted[tag]) == residual``.
    """

    def __init__(self, field=QQ, track: bool = True):
        self.field = field
        self.track = track
        self.pivots: dict[int, tuple[dict, dict]] = {}

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping, combo: dict | None = None) -> tuple[dict, dict]:
        f = self.field
        vec = dict(vec)
        combo = {} if combo is None else dict(combo)
        pivots = self.pivots
        while vec:
            low = max(vec)
            hit = pivots.get(low)
            if hit is None:
                break
            pv, pc = hit
            a = -f.div(vec[low], pv[low])
            f.axpy(vec, a, pv)
            if self.track:
                f.axpy(combo, a, pc)
        return vec, combo

    def add(self, vec: Mapping, tag=None) -> bool:
        """Insert ``vec``; returns False when it was already in the span."""
        start = {tag: 1} if (self.track and tag is not None) else {}
        residual, combo = self.reduce(vec, start)
        if not residual:
            return False
        self.pivots[max(residual)] = (residual, combo)
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def coordinates(self, vec: Mapping) -> dict | None:
        """Coefficients c with vec == sum(c[tag] * inserted[tag]), or None."""
        residual, combo = self.reduce(vec)
        if residual:
            return None
        return {k: -v for k, v in combo.items()}


def rank(columns: Iterable[Mapping], field=QQ) -> int:
    basis = EchelonBasis(field, track=False)
    return sum(1 for col in columns if basis.add(col))


def reduce_matrix(columns: list[Mapping], field=QQ, order: Iterable[int] | None = None):
    """Column reduction of a matrix given as sparse columns.

    Returns ``(reduced, transform, pivot_of_row)`` where ``reduced[j] ==
    sum_k transform[j][k] * columns[k]`` and the nonzero reduced columns
    have pairwise distinct leading rows; ``pivot_of_row`` maps each leading
    row to its column.  Zero reduced columns give a kernel basis through
    their transform vectors.
    """
    f = field
    reduced: list[dict] = [dict() for _ in columns]
    transform: list[dict] = [dict() for _ in columns]
    pivot_of_row: dict[int, int] = {}
    for j in order if order is not None else range(len(columns)):
        col = to_field(columns[j], f)
        comb = {j: 1}
        while col:
            low = max(col)
            k = pivot_of_row.get(low)
            if k is None:
                break
            rk = reduced[k]
            a = -f.div(col[low], rk[low])
            f.axpy(col, a, rk)
            f.axpy(comb, a, transform[k])
        reduced[j] = col
        transform[j] = comb
        if col:
            pivot_of_row[max(col)] = j
    return reduced, transform, pivot_of_row


def solve(columns: list[Mapping], rhs: Mapping, field=QQ, order: Iterable[int] | None = None) -> dict | None:
    """Some x (sparse, keyed by column index) with sum x_j * columns[j] == rhs.

    The particular solution depends on ``order``, the sequence in which
    columns become pivots; any order gives a valid solution.
    """
    basis = EchelonBasis(field, track=True)
    for j in order if order is not None else range(len(columns)):
        basis.add(to_field(columns[j], field), tag=j)
    return basis.coordinates(to_field(rhs, field))


def apply(columns: list[Mapping], x: Mapping, field=QQ) -> dict:
    """Matrix-vector product for a matrix stored as sparse columns."""
    out: dict = {}
    for j, a in x.items():
        if a:
            field.axpy(out, a, columns[j])
    return out
