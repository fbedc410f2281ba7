"""Unit-cell templates of periodic cell complexes and their finite windows.

A template lists one representative per translation class of cells.  Each
boundary entry names a face, an integer coefficient and the translation
of the face representative, so the boundary of a cell is an element of
the group ring Z[Z^d] with coefficients in the faces.  Windows are built
either with periodic boundary conditions (X_n) or as the closed union of
a box of translates inside the infinite complex (Y_n).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .cell_complex import ChainMap, FiniteCellComplex
from .errors import (
    BoundarySquareNonzero,
    DanglingFace,
    DimensionError,
    DivisibilityError,
    ParseError,
    TemplateError,
)
from .wqg import WeightedQuotientGraph

Shift = tuple[int, ...]


def _add(a: Sequence[int], b: Sequence[int]) -> Shift:
    return tuple(x + y for x, y in zip(a, b))


def _mod(t: Sequence[int], n: Sequence[int]) -> Shift:
    return tuple(x % k for x, k in zip(t, n))


@dataclass(frozen=True)
class BoundaryEntry:
    face: str
    coeff: int
    shift: Shift


@dataclass(frozen=True)
class TemplateCell:
    id: str
    dim: int
    boundary: tuple[BoundaryEntry, ...] = ()


class ShiftPolynomialMatrix:
    """Sparse matrix over the group ring Z[Z^d]: entries map shift -> coefficient."""

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], Mapping[Shift, int]] | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], dict[Shift, int]] = {}
        for key, poly in (entries or {}).items():
            clean = {s: c for s, c in poly.items() if c}
            if clean:
                self.entries[key] = clean

    def __matmul__(self, other: ShiftPolynomialMatrix) -> ShiftPolynomialMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list] = {}
        for (k, j), poly in other.entries.items():
            by_row.setdefault(k, []).append((j, poly))
        out: dict[tuple[int, int], dict[Shift, int]] = {}
        for (i, k), left in self.entries.items():
            for j, right in by_row.get(k, ()):
                acc = out.setdefault((i, j), {})
                for s, a in left.items():
                    for t, b in right.items():
                        u = _add(s, t)
                        acc[u] = acc.get(u, 0) + a * b
        return ShiftPolynomialMatrix(self.rows, other.cols, out)

    def nonzero(self) -> list[tuple[int, int, Shift, int]]:
        return sorted((i, j, s, c) for (i, j), poly in self.entries.items() for s, c in poly.items())


@dataclass(frozen=True, eq=False)
class PeriodicComplexTemplate:
    """Unit cell of a d-periodic complex.

    ``cover`` optionally lists (cell id, shift) seeds whose closure is the
    patch translated around to cover windows; by default the seeds are all
    cells of the unit cell at shift 0.
    """

    d: int
    cells: tuple[TemplateCell, ...]
    cover: tuple[tuple[str, Shift], ...] | None = None

    @cached_property
    def by_id(self) -> dict[str, TemplateCell]:
        return {c.id: c for c in self.cells}

    @cached_property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    @cached_property
    def cells_by_dim(self) -> list[list[TemplateCell]]:
        """Cells grouped by dimension, input order kept inside each group."""
        out: list[list[TemplateCell]] = [[] for _ in range(self.dimension + 1)]
        for c in self.cells:
            out[c.dim].append(c)
        return out

    @cached_property
    def position(self) -> dict[str, int]:
        """Index of each cell among the template cells of its dimension."""
        return {c.id: i for level in self.cells_by_dim for i, c in enumerate(level)}

    def counts(self) -> list[int]:
        return [len(level) for level in self.cells_by_dim]

    def boundary_matrix(self, q: int) -> ShiftPolynomialMatrix:
        """Boundary from q-cells to (q-1)-cells as a shift-polynomial matrix."""
        levels = self.cells_by_dim
        rows = len(levels[q - 1]) if q >= 1 else 0
        cols = len(levels[q]) if q < len(levels) else 0
        entries: dict = {}
        for j, cell in enumerate(levels[q] if q < len(levels) else ()):
            for b in cell.boundary:
                poly = entries.setdefault((self.position[b.face], j), {})
                poly[b.shift] = poly.get(b.shift, 0) + b.coeff
        return ShiftPolynomialMatrix(rows, cols, entries)

    def closure(self, seeds) -> set[tuple[str, Shift]]:
        """Smallest subcomplex of the infinite complex containing the seeds."""
        seen: set[tuple[str, Shift]] = set()
        stack = [(c, tuple(s)) for c, s in seeds]
        while stack:
            c, s = stack.pop()
            if (c, s) in seen:
                continue
            seen.add((c, s))
            for b in self.by_id[c].boundary:
                if b.coeff:
                    stack.append((b.face, _add(s, b.shift)))
        return seen

    @cached_property
    def patch(self) -> frozenset[tuple[str, Shift]]:
        """The closed patch whose translates form the standard cover."""
        zero = (0,) * self.d
        seeds = self.cover if self.cover is not None else [(c.id, zero) for c in self.cells]
        return frozenset(self.closure(seeds))

    def to_json(self) -> dict:
        doc = {
            "d": self.d,
            "cells": [
                {
                    "id": c.id,
                    "dim": c.dim,
                    "boundary": [{"face": b.face, "coeff": b.coeff, "shift": list(b.shift)} for b in c.boundary],
                }
                for c in self.cells
            ],
        }
        if self.cover is not None:
            doc["cover"] = [{"cell": c, "shift": list(s)} for c, s in self.cover]
        return doc


def _int(x, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise ParseError(f"{what} must be an integer")
    return x


def parse_template(text: str | Mapping) -> PeriodicComplexTemplate:
    """Parse a template document; structure is checked, algebra is not."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    else:
        doc = text
    try:
        d = _int(doc["d"], "'d'")
        cells = []
        for item in doc["cells"]:
            boundary = tuple(
                BoundaryEntry(str(b["face"]), _int(b["coeff"], "coeff"), tuple(_int(x, "shift entry") for x in b["shift"]))
                for b in item.get("boundary", [])
            )
            cells.append(TemplateCell(str(item["id"]), _int(item["dim"], "dim"), boundary))
        cover = None
        if "cover" in doc:
            cover = tuple((str(s["cell"]), tuple(_int(x, "shift entry") for x in s["shift"])) for s in doc["cover"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed template document: {exc!r}") from exc
    return PeriodicComplexTemplate(d, tuple(cells), cover)


def template_from_wqg(Q: WeightedQuotientGraph) -> PeriodicComplexTemplate:
    """Vertex cells plus edge cells with boundary head@w(e) - tail@0."""
    ids = list(Q.vertices) + [e.id for e in Q.edges]
    if len(set(ids)) != len(ids):
        raise ParseError("vertex and edge ids must be distinct to form a template")
    zero = (0,) * Q.d
    cells = [TemplateCell(v, 0) for v in Q.vertices]
    for e in Q.edges:
        cells.append(TemplateCell(e.id, 1, (BoundaryEntry(e.head, 1, e.weight), BoundaryEntry(e.tail, -1, zero))))
    return PeriodicComplexTemplate(Q.d, tuple(cells))


def validate_template(T: PeriodicComplexTemplate) -> bool:
    """Check structure and that consecutive shift-polynomial boundaries compose to zero."""
    if T.d < 0:
        raise DimensionError("d must be nonnegative")
    seen = set()
    for c in T.cells:
        if c.id in seen:
            raise TemplateError(f"duplicate cell id {c.id!r}")
        seen.add(c.id)
        if c.dim < 0:
            raise DimensionError(f"cell {c.id!r} has negative dimension")
    for c in T.cells:
        if c.dim == 0 and c.boundary:
            raise DimensionError(f"0-cell {c.id!r} has a boundary")
        for b in c.boundary:
            face = T.by_id.get(b.face)
            if face is None:
                raise DanglingFace(f"cell {c.id!r} has unknown face {b.face!r}")
            if face.dim != c.dim - 1:
                raise DimensionError(f"face {b.face!r} of {c.id!r} has dimension {face.dim}, expected {c.dim - 1}")
            if len(b.shift) != T.d:
                raise DimensionError(f"cell {c.id!r}: shift {list(b.shift)} has length {len(b.shift)}, expected {T.d}")
    if T.cover is not None:
        for cid, s in T.cover:
            if cid not in T.by_id:
                raise DanglingFace(f"cover seed names unknown cell {cid!r}")
            if len(s) != T.d:
                raise DimensionError(f"cover seed {cid!r} has shift of length {len(s)}")
    levels = T.cells_by_dim
    for q in range(2, T.dimension + 1):
        product = T.boundary_matrix(q - 1) @ T.boundary_matrix(q)
        for i, j, s, coeff in product.nonzero():
            raise BoundarySquareNonzero(levels[q][j].id, levels[q - 2][i].id, s, coeff)
    return True


def offset_bound(T: PeriodicComplexTemplate) -> int:
    """Largest l-infinity norm of a boundary shift."""
    return max((max((abs(x) for x in b.shift), default=0) for c in T.cells for b in c.boundary), default=0)


@dataclass(frozen=True, eq=False)
class WindowComplex:
    """A finite window with labels (template cell id, shift) for every cell."""

    template: PeriodicComplexTemplate
    n: Shift
    flavor: str
    complex: FiniteCellComplex
    labels: tuple[tuple[tuple[str, Shift], ...], ...]

    @cached_property
    def index(self) -> list[dict[tuple[str, Shift], int]]:
        return [{lab: i for i, lab in enumerate(level)} for level in self.labels]

    def counts(self) -> list[int]:
        return [len(level) for level in self.labels]

    def chain(self, q: int, terms: Mapping[tuple[str, Sequence[int]], int]) -> dict:
        """Translate {(cell id, shift): coeff} into a window chain (shifts reduced mod n when periodic)."""
        out: dict = {}
        for (cid, s), a in terms.items():
            s = _mod(s, self.n) if self.flavor == "periodic" else tuple(s)
            i = self.index[q][(cid, s)]
            out[i] = out.get(i, 0) + a
        return {i: a for i, a in out.items() if a}

    def to_json(self) -> dict:
        return {
            "n": list(self.n),
            "flavor": self.flavor,
            "cells": [[[c, list(s)] for c, s in level] for level in self.labels],
        }


def _complex_from_labels(T: PeriodicComplexTemplate, labels, locate) -> FiniteCellComplex:
    index = [{lab: i for i, lab in enumerate(level)} for level in labels]
    boundaries = []
    for q, level in enumerate(labels):
        cols = []
        for cid, t in level:
            col: dict = {}
            for b in T.by_id[cid].boundary:
                i = index[q - 1][locate(b.face, _add(t, b.shift))]
                col[i] = col.get(i, 0) + b.coeff
            cols.append({i: v for i, v in col.items() if v})
        boundaries.append(tuple(cols))
    return FiniteCellComplex(tuple(tuple(level) for level in labels), tuple(boundaries))


def build_window(T: PeriodicComplexTemplate, n: Sequence[int], flavor: str = "periodic") -> WindowComplex:
    """X_n (periodic) or Y_n (truncated) for window sizes n.

    Cells are ordered by (template index, shift) inside each dimension.
    """
    validate_template(T)
    n = tuple(int(k) for k in n)
    if len(n) != T.d:
        raise DimensionError(f"window has {len(n)} sizes, expected {T.d}")
    if any(k < 1 for k in n):
        raise ValueError("window sizes must be positive")
    box = list(itertools.product(*(range(k) for k in n)))
    if flavor == "periodic":
        labels = [[(c.id, t) for c in level for t in box] for level in T.cells_by_dim]
        cx = _complex_from_labels(T, labels, lambda cid, s: (cid, _mod(s, n)))
    elif flavor == "truncated":
        present = T.closure((c.id, t) for c in T.cells for t in box)
        labels = [[] for _ in T.cells_by_dim]
        for cid, t in present:
            labels[T.by_id[cid].dim].append((cid, t))
        for level in labels:
            level.sort(key=lambda lab: (T.position[lab[0]], lab[1]))
        cx = _complex_from_labels(T, labels, lambda cid, s: (cid, s))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return WindowComplex(T, n, flavor, cx, tuple(tuple(level) for level in labels))


def covering_projection(
    T: PeriodicComplexTemplate,
    source_n: Sequence[int],
    target_n: Sequence[int],
    source: WindowComplex | None = None,
    target: WindowComplex | None = None,
) -> ChainMap:
    """Chain map X_{n'} -> X_n sending (c, t) to (c, t mod n)."""
    source_n, target_n = tuple(source_n), tuple(target_n)
    if len(source_n) != len(target_n) or any(a % b for a, b in zip(source_n, target_n)):
        raise DivisibilityError(f"{list(target_n)} does not divide {list(source_n)}")
    source = source or build_window(T, source_n)
    target = target or build_window(T, target_n)
    matrices = tuple(
        tuple({target.index[q][(cid, _mod(t, target_n))]: 1} for cid, t in level)
        for q, level in enumerate(source.labels)
    )
    return ChainMap(source.complex, target.complex, matrices)


def patch_in_window(W: WindowComplex, shift: Sequence[int]) -> dict[int, list[int]]:
    """Cells of the translated patch inside a periodic window, per dimension."""
    out: dict[int, set[int]] = {}
    for cid, s in W.template.patch:
        q = W.template.by_id[cid].dim
        out.setdefault(q, set()).add(W.index[q][(cid, _mod(_add(s, shift), W.n))])
    return {q: sorted(v) for q, v in out.items()}
