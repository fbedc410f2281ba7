"""Mayer-Vietoris spectral sequence of a window covered by translated patches.

The cover of X_n by translates of a closed patch gives a nerve N and the
blow-up bicomplex E^0_{p,q} spanned by pairs (p-simplex s of N, q-cell of
the intersection over s).  Filtering the total complex by p, every page
of the spectral sequence can be read off one column reduction of the
total boundary in a filtration-compatible order: a pair (i, j) with
filtration gap g contributes to E^r at both ends for r <= g, and d^g maps
the class of j to the class of i.  Essential columns survive to E^infinity
and give a filtration-adapted basis of H(X_n).

The literal zig-zag description of the differentials is kept as an
independent check (``verify_differentials``).
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .builder import PeriodicComplexTemplate, WindowComplex, build_window, covering_projection, offset_bound, patch_in_window
from .cell_complex import (
    FiniteCellComplex,
    HomologyResult,
    homology,
    induced_map,
    matrix_rank,
    push_forward,
    span_rank_modulo_boundaries,
    subcomplex,
)
from .errors import (
    AnticommutationFailure,
    ArityOverflow,
    ClassNotFound,
    DivisibilityError,
    InsufficientData,
    InvalidComplex,
    LiftFailure,
    MismatchWithDirectHomology,
    NotACycle,
)
from .linalg import QQ, EchelonBasis, apply, solve, to_field

Simplex = tuple[int, ...]


# --------------------------------------------------------------------- cover


@dataclass(frozen=True, eq=False)
class Cover:
    """Face-closed subcomplexes of ``complex`` whose union is everything."""

    complex: FiniteCellComplex
    elements: tuple[dict[int, tuple[int, ...]], ...]
    labels: tuple = ()
    window: WindowComplex | None = None

    def __post_init__(self):
        X = self.complex
        covered = [set() for _ in range(X.dimension + 1)]
        for k, el in enumerate(self.elements):
            for q, cells in el.items():
                members = set(cells)
                covered[q] |= members
                if q == 0:
                    continue
                for j in cells:
                    if any(i not in el.get(q - 1, ()) for i in X.boundary(q)[j]):
                        raise InvalidComplex(f"cover element {k} is not closed under faces")
        for q in range(X.dimension + 1):
            if len(covered[q]) != X.count(q):
                raise InvalidComplex(f"cover misses {X.count(q) - len(covered[q])} cells of dimension {q}")

    @cached_property
    def containing(self) -> list[list[tuple[int, ...]]]:
        """For every cell, the sorted indices of the elements containing it."""
        out = [[[] for _ in range(self.complex.count(q))] for q in range(self.complex.dimension + 1)]
        for k, el in enumerate(self.elements):
            for q, cells in el.items():
                for j in cells:
                    out[q][j].append(k)
        return [[tuple(v) for v in level] for level in out]

    def element_sizes(self) -> list[list[int]]:
        return [[len(el.get(q, ())) for q in range(self.complex.dimension + 1)] for el in self.elements]


def build_cover(W: WindowComplex) -> Cover:
    """One element per window shift t: the template patch translated by t."""
    if W.flavor != "periodic":
        raise ValueError("covers are built on periodic windows")
    box = list(itertools.product(*(range(k) for k in W.n)))
    elements = tuple({q: tuple(v) for q, v in patch_in_window(W, t).items()} for t in box)
    return Cover(W.complex, elements, tuple(box), W)


def explicit_cover(X: FiniteCellComplex, elements: Sequence[Mapping[int, Sequence[int]]], labels=None) -> Cover:
    els = tuple({q: tuple(sorted(set(v))) for q, v in el.items()} for el in elements)
    return Cover(X, els, tuple(labels) if labels is not None else tuple(range(len(els))))


# --------------------------------------------------------------------- nerve


@dataclass(frozen=True, eq=False)
class NerveComplex:
    cover: Cover
    simplices: tuple[Simplex, ...]
    intersections: dict  # simplex -> {q: tuple of cells}
    max_arity: int

    @property
    def top_arity(self) -> int:
        return max((len(s) for s in self.simplices), default=0)

    def count(self, p: int) -> int:
        return sum(1 for s in self.simplices if len(s) == p + 1)


def nerve(cover: Cover, max_arity: int = 32) -> NerveComplex:
    """All index sets with a nonempty common intersection.

    Every such set is a subset of the containing-set of some cell, so the
    nerve is enumerated from those sets; arities above ``max_arity`` raise.
    """
    if max_arity < 1:
        raise ValueError("max_arity must be positive")
    inter: dict[Simplex, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
    for q, level in enumerate(cover.containing):
        for j, owners in enumerate(level):
            if len(owners) > max_arity:
                raise ArityOverflow(f"{len(owners)} cover elements share a cell, cap is {max_arity}")
            for size in range(1, len(owners) + 1):
                for s in itertools.combinations(owners, size):
                    inter[s][q].append(j)
    simplices = tuple(sorted(inter, key=lambda s: (len(s), s)))
    frozen = {s: {q: tuple(v) for q, v in inter[s].items()} for s in simplices}
    return NerveComplex(cover, simplices, frozen, max_arity)


# ------------------------------------------------------------------- blow-up


@dataclass(eq=False)
class BlowupComplex:
    """Basis elements (p, q, simplex, cell) in total-complex order with both differentials."""

    cover: Cover
    nerve: NerveComplex
    elements: list[tuple[int, int, Simplex, int]]
    d0: list[dict]
    d1: list[dict]

    @cached_property
    def degree(self) -> list[int]:
        return [p + q for p, q, _, _ in self.elements]

    @cached_property
    def level(self) -> list[int]:
        return [e[0] for e in self.elements]

    def dims(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = defaultdict(int)
        for p, q, _, _ in self.elements:
            out[(p, q)] += 1
        return dict(out)

    def total(self, j: int) -> dict:
        col = dict(self.d0[j])
        for i, a in self.d1[j].items():
            col[i] = col.get(i, 0) + a
        return {i: a for i, a in col.items() if a}

    @cached_property
    def total_columns(self) -> list[dict]:
        return [self.total(j) for j in range(len(self.elements))]

    def verify(self) -> None:
        """(d0)^2 = 0, (d1)^2 = 0 and d0 d1 + d1 d0 = 0, checked on every basis element."""
        for j in range(len(self.elements)):
            for name, a, b in (("d0 d0", self.d0, self.d0), ("d1 d1", self.d1, self.d1)):
                if _int_apply(a, b[j]):
                    raise AnticommutationFailure(f"{name} is nonzero on element {self.elements[j]}")
            s = _int_apply(self.d0, self.d1[j])
            for i, c in _int_apply(self.d1, self.d0[j]).items():
                s[i] = s.get(i, 0) + c
            if any(s.values()):
                raise AnticommutationFailure(f"d0 d1 + d1 d0 is nonzero on element {self.elements[j]}")

    def total_complex(self) -> FiniteCellComplex:
        """The total complex as a graded complex in its own right."""
        top = max(self.degree, default=-1)
        groups = [[j for j in range(len(self.elements)) if self.degree[j] == k] for k in range(top + 1)]
        where = {}
        for level in groups:
            for i, j in enumerate(level):
                where[j] = i
        cols = self.total_columns
        return FiniteCellComplex(
            tuple(tuple(self.elements[j] for j in level) for level in groups),
            tuple(tuple({where[i]: a for i, a in cols[j].items()} for j in level) for level in groups),
        )

    def augmentation(self, chain: Mapping[int, object], field=QQ) -> dict:
        """Map a total chain to X: (s, c) goes to c when s is a vertex of the nerve, else to 0."""
        out: dict = {}
        for idx, a in chain.items():
            p, q, _, cell = self.elements[idx]
            if p == 0:
                out[cell] = field.coerce(out.get(cell, 0) + a)
        return {c: a for c, a in out.items() if a}


def _int_apply(columns: Sequence[Mapping], x: Mapping) -> dict:
    out: dict = {}
    for j, a in x.items():
        for i, b in columns[j].items():
            out[i] = out.get(i, 0) + a * b
    return {i: v for i, v in out.items() if v}


def blowup(cover: Cover, N: NerveComplex | None = None, verify: bool = True) -> BlowupComplex:
    N = N or nerve(cover)
    X = cover.complex
    elements = []
    for s in N.simplices:
        for q, cells in N.intersections[s].items():
            for j in cells:
                elements.append((len(s) - 1, q, s, j))
    elements.sort()
    index = {(s, q, j): i for i, (_, q, s, j) in enumerate(elements)}
    d0, d1 = [], []
    for p, q, s, j in elements:
        d0.append({index[(s, q - 1, i)]: a for i, a in X.boundary(q)[j].items()} if q else {})
        col = {}
        if p:
            sign = -1 if q % 2 else 1
            for k in range(len(s)):
                col[index[(s[:k] + s[k + 1:], q, j)]] = sign * (-1 if k % 2 else 1)
        d1.append(col)
    B = BlowupComplex(cover, N, elements, d0, d1)
    if verify:
        B.verify()
    return B


# ------------------------------------------------------------------- pages


class DifferentialMismatch(AnticommutationFailure):
    """A literal zig-zag differential disagrees with the reduction."""


def stabilization_index(p: int, q: int) -> int:
    return max(0, p + 1, q + 2)


@dataclass(eq=False)
class SpectralSequenceState:
    blowup: BlowupComplex
    field: object
    reduced: dict[int, dict]  # negative j -> reduced column R_j
    transform: dict[int, dict]  # essential or negative j -> V_j
    partner: dict[int, int]  # both directions
    essential: list[int]

    @cached_property
    def position(self) -> list[tuple[int, int]]:
        return [(p, q) for p, q, _, _ in self.blowup.elements]

    def gap(self, idx: int) -> float:
        """Filtration gap of the pair containing idx (infinite when essential)."""
        other = self.partner.get(idx)
        if other is None:
            return math.inf
        return abs(self.blowup.level[idx] - self.blowup.level[other])

    def alive(self, idx: int, r: float) -> bool:
        return r == 0 or self.gap(idx) >= r

    @cached_property
    def last_page(self) -> int:
        """Global stabilization index: max of max(0, p+1, q+2) over the nonzero E^0 grid."""
        return max((stabilization_index(p, q) for p, q in set(self.position)), default=0)

    def page_dims(self, r: float) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = defaultdict(int)
        for idx, pos in enumerate(self.position):
            if self.alive(idx, r):
                out[pos] += 1
        return {k: v for k, v in out.items() if v}

    @cached_property
    def pages(self) -> dict:
        out = {r: self.page_dims(r) for r in range(self.last_page + 1)}
        out[math.inf] = self.page_dims(math.inf)
        return out

    @property
    def e_infinity(self) -> dict[tuple[int, int], int]:
        return self.pages[math.inf]

    @cached_property
    def _by_position(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i, pos in enumerate(self.position):
            out[pos].append(i)
        return out

    def basis(self, r: float, p: int, q: int) -> list[int]:
        return [i for i in self._by_position.get((p, q), ()) if self.alive(i, r)]

    def differential_columns(self, r: int) -> dict[int, dict]:
        """Sparse d^r on the page-r basis elements, keyed by blow-up index."""
        if r == 0:
            return {j: {i: self.field.coerce(a) for i, a in col.items()} for j, col in enumerate(self.blowup.d0) if col}
        return {j: {self.partner[j]: 1} for j in self.reduced if self.gap(j) == r}

    def differential(self, r: int, p: int, q: int) -> list[list]:
        """Matrix of d^r : E^r_{p,q} -> E^r_{p-r,q+r-1} in the page bases."""
        cols = self.basis(r, p, q)
        rows = self.basis(r, p - r, q + r - 1)
        where = {i: k for k, i in enumerate(rows)}
        m = [[0] * len(cols) for _ in rows]
        for c, j in enumerate(cols):
            if r == 0:
                for i, a in self.blowup.d0[j].items():
                    m[where[i]][c] = self.field.coerce(a)
            elif self.gap(j) == r and j in self.reduced:
                m[where[self.partner[j]]][c] = 1
        return m

    def representative(self, idx: int) -> dict:
        """A total-complex chain whose top component represents idx on its pages."""
        if idx in self.transform:
            return self.transform[idx]
        return self.reduced[self.partner[idx]]

    def zigzag(self, idx: int, r: int) -> tuple[dict, ...]:
        """Components (x_0, ..., x_{r-1}) of the representative, level p down to p-r+1."""
        rep = self.representative(idx)
        level = self.blowup.level
        top = max((level[i] for i in rep), default=self.blowup.level[idx])
        out = []
        for k in range(r):
            out.append({i: a for i, a in rep.items() if level[i] == top - k})
        return tuple(out)

    # -- consistency checks -------------------------------------------

    def check_pages(self) -> None:
        """Monotone page dimensions, stabilization by max(0, p+1, q+2), d^r d^r = 0."""
        pages = self.pages
        for r in range(self.last_page):
            for pos, dim in pages[r + 1].items():
                if dim > pages[r].get(pos, 0):
                    raise DifferentialMismatch(f"page {r + 1} grows at {pos}")
        for pos in set(self.position):
            for r in range(stabilization_index(*pos), self.last_page + 1):
                if pages[r].get(pos, 0) != pages[math.inf].get(pos, 0):
                    raise DifferentialMismatch(f"position {pos} has not stabilized by page {r}")
        for r in range(self.last_page + 1):
            cols = self.differential_columns(r)
            for j, col in cols.items():
                if not self.alive(j, r) or any(not self.alive(i, r) for i in col):
                    raise DifferentialMismatch(f"d^{r} leaves page {r} at element {j}")
                twice = apply(cols, {i: a for i, a in col.items() if i in cols}, self.field) if col else {}
                if twice:
                    raise DifferentialMismatch(f"d^{r} d^{r} is nonzero on element {self.blowup.elements[j]}")

    def verify_differentials(self, max_page: int | None = None) -> int:
        """Recompute every d^r (r >= 1) from zig-zags solved in E^0.

        For a class x_0 at (p, q) the chain x_1 + ... + x_{r-1} is solved
        from d0 x_{i+1} = -d1 x_i in one linear system, once with each of
        two pivot orders; d^r[x_0] is then the class of d1 x_{r-1}, read
        off in the page-r basis.  Returns the number of checks performed.
        """
        B = self.blowup
        f = self.field
        level, degree = B.level, B.degree
        cols = [to_field(c, f) for c in B.total_columns]
        boundaries = EchelonBasis(f, track=True)
        for j, col in self.reduced.items():
            boundaries.add(col, tag=self.partner[j])
        last = self.last_page if max_page is None else min(max_page, self.last_page)
        checks = 0
        for r in range(1, last + 1):
            groups: dict[tuple[int, int], list[int]] = defaultdict(list)
            for idx in range(len(B.elements)):
                if self.alive(idx, r) and level[idx] - r >= 0:
                    groups[(level[idx], degree[idx])].append(idx)
            for (p, k), members in sorted(groups.items()):
                unknowns = [b for b in range(len(B.elements)) if degree[b] == k and p - r < level[b] < p]
                restricted = [{i: a for i, a in cols[b].items() if level[i] > p - r} for b in unknowns]
                for idx in members:
                    x0 = self.zigzag(idx, 1)[0]
                    image = apply(cols, x0, f)
                    rhs = {i: -a for i, a in image.items() if level[i] > p - r}
                    results = []
                    for order in (range(len(unknowns)), range(len(unknowns) - 1, -1, -1)):
                        sol = solve(restricted, rhs, f, order=list(order)) if rhs else {}
                        if sol is None:
                            raise LiftFailure(f"no zig-zag of length {r} from element {B.elements[idx]}")
                        chain = dict(x0)
                        for t, a in sol.items():
                            f.axpy(chain, a, {unknowns[t]: 1})
                        y = apply(cols, chain, f)
                        if any(level[i] != p - r for i in y):
                            raise LiftFailure("zig-zag boundary leaves its filtration level")
                        coords = boundaries.coordinates(y)
                        if coords is None:
                            raise LiftFailure("zig-zag boundary is not a boundary")
                        coords = {
                            i: a for i, a in coords.items() if a and level[i] == p - r and self.alive(i, r)
                        }
                        results.append(coords)
                    expected = {}
                    if idx in self.reduced and self.gap(idx) == r:
                        expected = {self.partner[idx]: 1}
                    if results[0] != expected or results[1] != expected:
                        raise DifferentialMismatch(
                            f"d^{r} of {B.elements[idx]}: reduction gives {expected}, zig-zags give {results}"
                        )
                    checks += 1
        return checks

    # -- reports -----------------------------------------------------------

    def to_json(self) -> dict:
        def grid(d):
            return {f"{p},{q}": v for (p, q), v in sorted(d.items())}

        return {
            "pages": {str(r): grid(self.pages[r]) for r in range(self.last_page + 1)},
            "e_infinity": grid(self.e_infinity),
            "stabilization_index": self.last_page,
            "nerve_top_arity": self.blowup.nerve.top_arity,
        }

    def render(self, r: float) -> str:
        """Plain-text grid of dimensions, q rows from the top down, p columns."""
        dims = self.pages[r]
        if not dims:
            return "(empty)"
        P = max(p for p, _ in dims)
        Q = max(q for _, q in dims)
        width = max(len(str(v)) for v in dims.values())
        lines = []
        for q in range(Q, -1, -1):
            lines.append(f"q={q} | " + " ".join(str(dims.get((p, q), 0)).rjust(width) for p in range(P + 1)))
        lines.append("      " + " ".join(str(p).rjust(width) for p in range(P + 1)))
        return "\n".join(lines)


def compute_pages(B: BlowupComplex, field=QQ) -> SpectralSequenceState:
    """Column reduction of the total boundary, degrees processed top down with clearing."""
    f = field
    cols = B.total_columns
    degree = B.degree
    by_degree: dict[int, list[int]] = defaultdict(list)
    for j, k in enumerate(degree):
        by_degree[k].append(j)
    reduced: dict[int, dict] = {}
    transform: dict[int, dict] = {}
    partner: dict[int, int] = {}
    essential: list[int] = []
    cleared: set[int] = set()
    for k in sorted(by_degree, reverse=True):
        pivot_of_row: dict[int, int] = {}
        work: dict[int, tuple[dict, dict]] = {}
        zero: list[int] = []
        for j in by_degree[k]:
            if j in cleared:
                continue
            col = to_field(cols[j], f)
            comb = {j: f.coerce(1)}
            while col:
                low = max(col)
                other = pivot_of_row.get(low)
                if other is None:
                    break
                rk, vk = work[other]
                a = -f.div(col[low], rk[low])
                f.axpy(col, a, rk)
                f.axpy(comb, a, vk)
            work[j] = (col, comb)
            if col:
                low = max(col)
                pivot_of_row[low] = j
                partner[j] = low
                partner[low] = j
                reduced[j] = col
                transform[j] = comb
            else:
                zero.append(j)
        for j in zero:
            transform[j] = work[j][1]
        cleared = set(pivot_of_row)
        essential.extend(j for j in zero if j not in partner)
    # zero columns that later turned out to be paired (positive) keep no transform
    for j in list(transform):
        if j in partner and j not in reduced:
            del transform[j]
    essential = sorted(j for j in essential if j not in partner)
    S = SpectralSequenceState(B, f, reduced, transform, partner, essential)
    return S


# ----------------------------------------------------- homology from pages


@dataclass
class Reconstruction:
    betti: list[int]
    diagonal_sums: list[int]
    generators: list[list[dict]]  # per k: lifted chains in X, one per essential class
    levels: list[list[int]]  # filtration level of each generator
    essential: list[list[int]]  # blow-up index of each generator


def reconstruct_homology(S: SpectralSequenceState, direct: HomologyResult | None = None) -> Reconstruction:
    """Diagonal sums of E^infinity against direct homology, plus lifted generators.

    Each E^infinity class lifts to X through the p = 0 part of its cycle.
    The lifted classes must form a basis of H_k(X).
    """
    B = S.blowup
    X = B.cover.complex
    direct = direct or homology(X, S.field)
    top = X.dimension
    sums = [0] * (top + 1)
    for (p, q), v in S.e_infinity.items():
        if p + q > top:
            raise MismatchWithDirectHomology(f"E^infinity has a class in degree {p + q} > {top}")
        sums[p + q] += v
    if sums != direct.betti:
        raise MismatchWithDirectHomology(f"E^infinity diagonals {sums} differ from direct Betti numbers {direct.betti}")
    gens: list[list[dict]] = [[] for _ in range(top + 1)]
    levels: list[list[int]] = [[] for _ in range(top + 1)]
    ess: list[list[int]] = [[] for _ in range(top + 1)]
    for idx in S.essential:
        k = B.degree[idx]
        gens[k].append(B.augmentation(S.transform[idx], S.field))
        levels[k].append(B.level[idx])
        ess[k].append(idx)
    for k in range(top + 1):
        if span_rank_modulo_boundaries(X, gens[k], k, S.field) != direct.betti[k]:
            raise MismatchWithDirectHomology(f"lifted E^infinity classes do not span H_{k}")
    return Reconstruction(direct.betti, sums, gens, levels, ess)


def total_complex_check(B: BlowupComplex, field=QQ, direct: HomologyResult | None = None) -> list[bool]:
    """Per degree: does the total complex have the homology of X?"""
    X = B.cover.complex
    direct = direct or homology(X, field)
    tot = homology(B.total_complex(), field).betti
    tot = tot + [0] * (len(direct.betti) - len(tot))
    return [
        (tot[k] if k < len(tot) else 0) == (direct.betti[k] if k < len(direct.betti) else 0)
        for k in range(max(len(tot), len(direct.betti)))
    ]


def local_e1_dims(B: BlowupComplex, field=QQ) -> dict[tuple[int, int], int]:
    """E^1 computed directly as the homology of every nerve intersection."""
    X = B.cover.complex
    out: dict[tuple[int, int], int] = defaultdict(int)
    cache: dict = {}
    for s in B.nerve.simplices:
        cells = B.nerve.intersections[s]
        key = tuple(sorted((q, v) for q, v in cells.items()))
        if key not in cache:
            sub, _ = subcomplex(X, cells)
            cache[key] = homology(sub, field).betti
        for q, b in enumerate(cache[key]):
            if b:
                out[(len(s) - 1, q)] += b
    return dict(out)


# ----------------------------------------------------- toroidal heuristics


class Lift:
    """Coordinates of homology classes of X in the filtration-adapted basis."""

    def __init__(self, S: SpectralSequenceState, recon: Reconstruction):
        self.S = S
        self.recon = recon
        X = S.blowup.cover.complex
        self._bases = []
        for k, gens in enumerate(recon.generators):
            basis = EchelonBasis(S.field, track=True)
            for col in X.boundary(k + 1):
                basis.add(to_field(col, S.field), tag=None)
            for i, g in enumerate(gens):
                basis.add(to_field(g, S.field), tag=i)
            self._bases.append(basis)

    def coordinates(self, z: Mapping, k: int) -> list:
        X = self.S.blowup.cover.complex
        if X.boundary_of(z, k, self.S.field):
            raise NotACycle(f"chain is not a {k}-cycle")
        if k >= len(self._bases):
            raise ClassNotFound(f"no homology in degree {k}")
        coords = self._bases[k].coordinates(to_field(z, self.S.field))
        if coords is None:
            raise ClassNotFound("class is not in the span of the lifted generators")
        return [coords.get(i, 0) for i in range(len(self.recon.generators[k]))]


def filtration_level(S: SpectralSequenceState, z: Mapping, k: int, lift: Lift | None = None) -> int:
    """Smallest p with a representative of [z] in filtration p of the total complex.

    The lifted E^infinity generators form a basis adapted to the filtration,
    so p* is the largest level among the generators that [z] uses.  The
    zero class has level 0.
    """
    lift = lift or Lift(S, reconstruct_homology(S))
    coords = lift.coordinates(z, k)
    levels = lift.recon.levels[k]
    return max((levels[i] for i, c in enumerate(coords) if c), default=0)


NON_TOROIDAL = "NonToroidal"
TOROIDAL_CANDIDATE = "ToroidalCandidate"


@dataclass
class ToroidalReport:
    """Filtration level and verdict for every generator of H(X_n).

    Level 0 certifies a non-toroidal class; higher levels only make a
    class a candidate, never a certain toroidal cycle.
    """

    n: tuple
    generators: list[list[dict]]  # per k: {"level", "verdict", "support"}
    counts: list[dict[int, int]]  # per k: level -> number of generators

    def to_json(self, max_generators: int | None = None) -> dict:
        degrees = []
        for k, gens in enumerate(self.generators):
            shown = gens if max_generators is None else gens[:max_generators]
            entry = {
                "degree": k,
                "betti": len(gens),
                "non_toroidal": sum(1 for g in gens if g["verdict"] == NON_TOROIDAL),
                "toroidal_candidates": sum(1 for g in gens if g["verdict"] == TOROIDAL_CANDIDATE),
                "by_level": {str(p): c for p, c in sorted(self.counts[k].items())},
                "generators": shown,
            }
            if len(shown) < len(gens):
                entry["truncated"] = len(gens) - len(shown)
            degrees.append(entry)
        return {"n": list(self.n), "degrees": degrees}


def toroidal_report(S: SpectralSequenceState, recon: Reconstruction, labels=None) -> ToroidalReport:
    X = S.blowup.cover.complex
    gens_out: list[list[dict]] = []
    counts: list[dict[int, int]] = []
    for k, gens in enumerate(recon.generators):
        rows = []
        tally: dict[int, int] = defaultdict(int)
        for g, p in zip(gens, recon.levels[k]):
            support = sorted(g)
            if labels is not None:
                support = [[labels[k][i][0], list(labels[k][i][1]), _jsonable(g[i])] for i in support]
            else:
                support = [[str(X.cells[k][i]), _jsonable(g[i])] for i in support]
            rows.append({"level": p, "verdict": NON_TOROIDAL if p == 0 else TOROIDAL_CANDIDATE, "support": support})
            tally[p] += 1
        gens_out.append(rows)
        counts.append(dict(tally))
    n = tuple(S.blowup.cover.window.n) if S.blowup.cover.window is not None else ()
    return ToroidalReport(n, gens_out, counts)


def _jsonable(x):
    if isinstance(x, int):
        return x
    return str(x)


@dataclass
class MvssResult:
    window: WindowComplex
    cover: Cover
    blowup: BlowupComplex
    state: SpectralSequenceState
    direct: HomologyResult
    reconstruction: Reconstruction
    total_check: list[bool]


def run_mvss(T: PeriodicComplexTemplate, n: Sequence[int], field=QQ, max_arity: int = 32, total_check: bool = True) -> MvssResult:
    """Window, cover, nerve, blow-up, pages and the Godement cross-check in one go."""
    W = build_window(T, n)
    C = build_cover(W)
    B = blowup(C, nerve(C, max_arity))
    S = compute_pages(B, field)
    direct = homology(W.complex, field)
    recon = reconstruct_homology(S, direct)
    check = total_complex_check(B, field, direct) if total_check else []
    return MvssResult(W, C, B, S, direct, recon, check)


def local_image_rank(W: WindowComplex, k: int, field=QQ, cover: Cover | None = None) -> int:
    """dim of the image of the direct sum of H_k(cover element) in H_k(X_n)."""
    cover = cover or build_cover(W)
    X = W.complex
    chains = []
    cache: dict = {}
    for el in cover.elements:
        key = tuple(sorted(el.items()))
        if key in cache:
            continue
        sub, maps = subcomplex(X, el)
        h = homology(sub, field)
        cache[key] = True
        if k < len(h.betti):
            chains.extend(push_forward(g, maps[k]) for g in h.generators[k])
    return span_rank_modulo_boundaries(X, chains, k, field)


def toroidal_candidate_count(T: PeriodicComplexTemplate, n: Sequence[int], k: int, field=QQ) -> tuple[int, int]:
    """(beta_k, beta_k - dim E^infinity_{0,k}) computed without the full spectral sequence.

    The p = 0 part of the filtration of H_k(X_n) is the image of the local
    homology of the cover elements, so its codimension counts the classes
    of level >= 1.
    """
    W = build_window(T, n)
    betti = homology(W.complex, field).betti
    b = betti[k] if k < len(betti) else 0
    return b, b - local_image_rank(W, k, field)


def projection_image_proxy(T: PeriodicComplexTemplate, n: Sequence[int], m: Sequence[int], field=QQ) -> list[dict]:
    """Rank and cokernel of H_k(X_n) -> H_k(X_m) for every k.

    This is a computable stand-in for the image of H(K): classes of X_m
    missed by a larger window are toroidal suspects.
    """
    n, m = tuple(n), tuple(m)
    if len(n) != len(m) or any(a % b for a, b in zip(n, m)):
        raise DivisibilityError(f"{list(m)} does not divide {list(n)}")
    src, tgt = build_window(T, n), build_window(T, m)
    f = covering_projection(T, n, m, src, tgt)
    hs, ht = homology(src.complex, field), homology(tgt.complex, field)
    out = []
    for k in range(len(ht.betti)):
        mat = induced_map(f, k, field, hs, ht)
        r = matrix_rank(mat, field) if mat and mat[0] else 0
        out.append({"degree": k, "source_betti": hs.betti[k], "target_betti": ht.betti[k], "rank": r, "cokernel": ht.betti[k] - r})
    return out


@dataclass
class ScalingReport:
    sizes: list[int]
    degree: int
    d: int
    betti: list[int]
    toroidal: list[int]
    betti_exponent: float | None
    toroidal_exponent: float | None
    tolerance: float
    offset_bound: int
    warnings: list[str] = field(default_factory=list)

    @property
    def betti_within_bound(self) -> bool | None:
        return None if self.betti_exponent is None else self.betti_exponent <= self.d + self.tolerance

    @property
    def toroidal_within_bound(self) -> bool | None:
        if self.toroidal_exponent is None:
            return True if not any(self.toroidal) else None
        return self.toroidal_exponent <= self.d - 1 + self.tolerance

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "d": self.d,
            "offset_bound": self.offset_bound,
            "sizes": self.sizes,
            "betti": self.betti,
            "toroidal_candidates": self.toroidal,
            "betti_exponent": _round(self.betti_exponent),
            "toroidal_exponent": _round(self.toroidal_exponent),
            "tolerance": self.tolerance,
            "betti_within_bound": self.betti_within_bound,
            "toroidal_within_bound": self.toroidal_within_bound,
            "warnings": self.warnings,
        }


def _round(x):
    return None if x is None else round(float(x), 6)


def fit_exponent(sizes: Sequence[int], values: Sequence[int]) -> float | None:
    """Least-squares slope of log(value) against log(size); None unless all values are positive."""
    import numpy as np

    if any(v <= 0 for v in values):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(np.asarray(values, dtype=float)), 1)
    return float(slope)


def _scaling_point(args):
    T, size, k, field = args
    return toroidal_candidate_count(T, (size,) * T.d, k, field)


def scaling_fit(
    T: PeriodicComplexTemplate,
    sizes: Sequence[int],
    k: int,
    field=QQ,
    tolerance: float = 0.15,
    workers: int = 1,
) -> ScalingReport:
    """Fit growth exponents of beta_k(X_n) and of the toroidal-candidate count over cubic windows."""
    sizes = [int(s) for s in sizes]
    if len(sizes) < 3:
        raise InsufficientData(f"need at least 3 sizes, got {len(sizes)}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    M = offset_bound(T)
    notes = []
    small = [s for s in sizes if s <= 4 * M]
    if small:
        msg = f"sizes {small} do not exceed 4M = {4 * M}; regular behaviour is not expected there"
        warnings.warn(msg)
        notes.append(msg)
    jobs = [(T, s, k, field) for s in sizes]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_scaling_point, jobs))
    else:
        points = [_scaling_point(j) for j in jobs]
    betti = [b for b, _ in points]
    tor = [t for _, t in points]
    return ScalingReport(sizes, k, T.d, betti, tor, fit_exponent(sizes, betti), fit_exponent(sizes, tor), tolerance, M, notes)
