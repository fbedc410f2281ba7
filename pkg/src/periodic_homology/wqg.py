"""Weighted quotient graphs of periodic graphs.

A weighted quotient graph (WQG) is the quotient of a d-periodic graph by
its translations, each edge carrying the Z^d offset between the lifts of
its endpoints.  Everything about H_0 and H_1 of the periodic graph, and of
its finite windows with periodic boundary conditions, can be read off from
the weights of cycles in the quotient.
"""

from __future__ import annotations

import enum
import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, InfiniteComponents, InvalidPath, NotACycle, ParseError, UnknownVertex
from .lattice import INFINITE, IntegerLattice

Vector = tuple[int, ...]


def _add(a: Sequence[int], b: Sequence[int], sign: int = 1) -> Vector:
    return tuple(x + sign * y for x, y in zip(a, b))


def _scale(a: Sequence[int], k: int) -> Vector:
    return tuple(k * x for x in a)


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    weight: Vector


@dataclass(frozen=True)
class EdgePath:
    """Edges in traversal order, each with direction +1 (forward) or -1.

    ``start`` pins the base vertex; it is required for the empty path and
    otherwise inferred from the first step.
    """

    steps: tuple[tuple[str, int], ...] = ()
    start: str | None = None

    def __post_init__(self):
        steps = tuple((str(e), int(s)) for e, s in self.steps)
        if any(s not in (1, -1) for _, s in steps):
            raise InvalidPath("step directions must be +1 or -1")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def from_word(cls, word: str, start: str | None = None) -> EdgePath:
        """Parse a composition word such as ``"f13^-1 e23 e12"``.

        Words compose right to left, so the rightmost edge is walked first.
        """
        steps = []
        for token in reversed(word.split()):
            m = re.fullmatch(r"([^\s^]+)(\^-1)?", token)
            if not m:
                raise InvalidPath(f"bad path token {token!r}")
            steps.append((m.group(1), -1 if m.group(2) else 1))
        return cls(tuple(steps), start)

    def inverse(self) -> EdgePath:
        return EdgePath(tuple((e, -s) for e, s in reversed(self.steps)), None if self.steps else self.start)

    def then(self, other: EdgePath) -> EdgePath:
        """Walk self, then other."""
        return EdgePath(self.steps + other.steps, self.start if self.steps or self.start else other.start)

    def power(self, k: int) -> EdgePath:
        base = self if k >= 0 else self.inverse()
        return EdgePath(base.steps * abs(k), self.start)

    def __len__(self) -> int:
        return len(self.steps)

    def word(self) -> str:
        """Composition word, the inverse of ``from_word``."""
        return " ".join(e + ("^-1" if s < 0 else "") for e, s in reversed(self.steps))


@dataclass(frozen=True, eq=False)
class WeightedQuotientGraph:
    d: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.d < 0:
            raise ParseError("d must be nonnegative")
        vertices = tuple(str(v) for v in self.vertices)
        if len(set(vertices)) != len(vertices):
            raise ParseError("duplicate vertex id")
        index = {v: i for i, v in enumerate(vertices)}
        edges = []
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise ParseError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            for v in (e.tail, e.head):
                if v not in index:
                    raise UnknownVertex(f"edge {e.id!r} references unknown vertex {v!r}")
            w = tuple(int(x) for x in e.weight)
            if len(w) != self.d:
                raise DimensionMismatch(f"edge {e.id!r} has weight of length {len(w)}, expected {self.d}")
            # tail index <= head index; flipping an edge negates its weight
            if index[e.tail] > index[e.head]:
                e = Edge(e.id, e.head, e.tail, _scale(w, -1))
            else:
                e = Edge(e.id, e.tail, e.head, w)
            edges.append(e)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def nu(self) -> int:
        return len(self.vertices)

    @property
    def epsilon(self) -> int:
        return len(self.edges)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise InvalidPath(f"unknown edge {eid!r}")

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)

    def components(self) -> list[list[str]]:
        """Connected components, each listed in vertex order, ordered by first vertex."""
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.edges:
            a, b = find(e.tail), find(e.head)
            if a != b:
                if self.vertex_index(a) < self.vertex_index(b):
                    parent[b] = a
                else:
                    parent[a] = b
        groups: dict[str, list[str]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: self.vertex_index(g[0]))

    def walk(self, p: EdgePath) -> tuple[str, str]:
        """Validate p and return its (start, end) vertices."""
        if not p.steps:
            if p.start is None:
                raise InvalidPath("empty path needs a start vertex")
            if p.start not in self.vertices:
                raise UnknownVertex(f"unknown vertex {p.start!r}")
            return p.start, p.start
        here = None
        first = None
        for eid, s in p.steps:
            e = self.edge(eid)
            a, b = (e.tail, e.head) if s > 0 else (e.head, e.tail)
            if here is None:
                first = a
                if p.start is not None and p.start != a:
                    raise InvalidPath(f"path starts at {a!r}, not {p.start!r}")
            elif here != a:
                raise InvalidPath(f"edge {eid!r} does not continue from vertex {here!r}")
            here = b
        return first, here

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head, "weight": list(e.weight)} for e in self.edges],
        }


def parse_wqg(text: str | Mapping) -> WeightedQuotientGraph:
    """Parse a WQG document (JSON text or an already decoded mapping)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    else:
        doc = text
    try:
        d = doc["d"]
        vertices = doc["vertices"]
        raw_edges = doc.get("edges", [])
        if not isinstance(d, int) or isinstance(d, bool):
            raise ParseError("'d' must be an integer")
        if not isinstance(vertices, list) or not isinstance(raw_edges, list):
            raise ParseError("'vertices' and 'edges' must be lists")
        edges = []
        for item in raw_edges:
            weight = item["weight"]
            if not isinstance(weight, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in weight):
                raise ParseError(f"edge {item.get('id')!r}: weight must be a list of integers")
            edges.append(Edge(str(item["id"]), str(item["tail"]), str(item["head"]), tuple(weight)))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed WQG document: {exc!r}") from exc
    return WeightedQuotientGraph(d, tuple(vertices), tuple(edges))


def path_weight(Q: WeightedQuotientGraph, p: EdgePath) -> Vector:
    Q.walk(p)
    w = (0,) * Q.d
    for eid, s in p.steps:
        w = _add(w, Q.edge(eid).weight, s)
    return w


@dataclass(frozen=True)
class SpanningForest:
    """Tree edges plus, per vertex, the root of its tree and the tree path to it."""

    tree_edges: tuple[str, ...]
    root: dict
    path_from_root: dict  # vertex -> EdgePath from its root
    potential: dict  # vertex -> weight of that path


def spanning_forest(Q: WeightedQuotientGraph, tree: Iterable[str] | None = None) -> SpanningForest:
    """BFS forest from the lowest vertex of each component, edges in input order.

    An explicit set of tree edges may be supplied instead; it must form a
    spanning forest.
    """
    allowed = None if tree is None else set(tree)
    if allowed is not None:
        for eid in allowed:
            Q.edge(eid)
    incident: dict[str, list[tuple[Edge, int]]] = {v: [] for v in Q.vertices}
    for e in Q.edges:
        if e.tail == e.head:
            continue
        incident[e.tail].append((e, 1))
        incident[e.head].append((e, -1))
    root, paths, pot = {}, {}, {}
    tree_edges = []
    for r in Q.vertices:
        if r in root:
            continue
        root[r] = r
        paths[r] = EdgePath((), r)
        pot[r] = (0,) * Q.d
        queue = deque([r])
        while queue:
            v = queue.popleft()
            for e, s in incident[v]:
                u = e.head if s > 0 else e.tail
                if u in root or (allowed is not None and e.id not in allowed):
                    continue
                root[u] = r
                paths[u] = paths[v].then(EdgePath(((e.id, s),)))
                pot[u] = _add(pot[v], e.weight, s)
                tree_edges.append(e.id)
                queue.append(u)
    if allowed is not None and set(tree_edges) != allowed:
        raise ParseError("supplied tree edges do not form a spanning forest")
    return SpanningForest(tuple(tree_edges), root, paths, pot)


def fundamental_cycle(Q: WeightedQuotientGraph, forest: SpanningForest, eid: str) -> EdgePath:
    """Cycle at the root: tree path to the head, the edge backwards, tree path home."""
    e = Q.edge(eid)
    return forest.path_from_root[e.head].then(EdgePath(((e.id, -1),))).then(forest.path_from_root[e.tail].inverse())


def _fundamental_weight(Q, forest, e: Edge) -> Vector:
    return _add(_add(forest.potential[e.head], e.weight, -1), forest.potential[e.tail], -1)


def weight_lattice(Q: WeightedQuotientGraph, tree: Iterable[str] | None = None) -> list[IntegerLattice]:
    """W of each connected component, generated by fundamental-cycle weights."""
    forest = spanning_forest(Q, tree)
    comps = Q.components()
    gens: dict[str, list[Vector]] = {c[0]: [] for c in comps}
    tree_set = set(forest.tree_edges)
    for e in Q.edges:
        if e.id not in tree_set:
            gens[forest.root[e.tail]].append(_fundamental_weight(Q, forest, e))
    return [IntegerLattice(Q.d, tuple(gens[c[0]])) for c in comps]


def betti0_periodic(Q: WeightedQuotientGraph) -> int | float:
    total = 0
    for W in weight_lattice(Q):
        idx = W.index()
        if idx == INFINITE:
            return INFINITE
        total += idx
    return total


def h1_generator_count(Q: WeightedQuotientGraph) -> int:
    """Number of H_1 generators up to translation of the periodic graph."""
    if betti0_periodic(Q) == INFINITE:
        raise InfiniteComponents("a component has a rank-deficient weight lattice")
    N = len(Q.components())
    return Q.epsilon - Q.nu + N * math.comb(Q.d - 1, 2)


@dataclass
class RecordedCycle:
    name: str
    path: EdgePath
    weight: Vector


@dataclass
class H1Generator:
    kind: str  # "commutator" or "shortcut"
    path: EdgePath
    component: int
    of: tuple[str, ...]  # names of the recorded cycles involved
    N: int | None = None
    c: tuple[int, ...] = ()
    d: tuple[int, ...] = ()


@dataclass
class ComponentReport:
    vertices: list[str]
    base_vertex: str
    lattice: IntegerLattice
    index: int
    coset_representatives: list[Vector]
    tree_edges: list[str]
    p: list[RecordedCycle]
    ell: list[RecordedCycle]


@dataclass
class GeneratorReport:
    components: list[ComponentReport]
    generators: list[H1Generator] = field(default_factory=list)

    @property
    def betti0(self) -> int:
        return sum(c.index for c in self.components)

    def to_json(self) -> dict:
        def cyc(r: RecordedCycle):
            return {"name": r.name, "path": r.path.word(), "weight": list(r.weight)}

        return {
            "betti0": self.betti0,
            "components": [
                {
                    "vertices": c.vertices,
                    "base_vertex": c.base_vertex,
                    "weight_lattice": [list(g) for g in c.lattice.generators],
                    "index": c.index,
                    "coset_representatives": [list(t) for t in c.coset_representatives],
                    "tree_edges": c.tree_edges,
                    "p": [cyc(r) for r in c.p],
                    "ell": [cyc(r) for r in c.ell],
                }
                for c in self.components
            ],
            "h1_generators": [
                {
                    "kind": g.kind,
                    "component": g.component,
                    "of": list(g.of),
                    "path": g.path.word(),
                    **({"N": g.N, "c": list(g.c), "d": list(g.d)} if g.kind == "shortcut" else {}),
                }
                for g in self.generators
            ],
        }


def construct_generators(Q: WeightedQuotientGraph, tree: Iterable[str] | None = None) -> GeneratorReport:
    """Explicit H_0 and H_1 generators of the periodic graph.

    Per component, non-tree edges are scanned in input order.  An edge whose
    fundamental cycle raises the rank of the weights collected so far is
    recorded as some p_i; the rest become l_j with the relation
    N w(l_j) = sum c_k w(p_k) + sum d_k w(l_k) for the smallest N > 0.
    The emitted cycles are the commutators of the p_i and the zero-weight
    shortcut cycles built from each relation.
    """
    forest = spanning_forest(Q, tree)
    tree_set = set(forest.tree_edges)
    comps = Q.components()
    reports = []
    gens: list[H1Generator] = []
    for ci, comp in enumerate(comps):
        base = comp[0]
        members = set(comp)
        non_tree = [e for e in Q.edges if e.id not in tree_set and e.tail in members]
        W = IntegerLattice(Q.d, tuple(_fundamental_weight(Q, forest, e) for e in non_tree))
        if W.rank < Q.d:
            raise InfiniteComponents(f"component of {base!r} has a weight lattice of rank {W.rank} < {Q.d}")
        ps: list[RecordedCycle] = []
        rest: list[Edge] = []
        for e in non_tree:
            w = _fundamental_weight(Q, forest, e)
            if len(ps) < Q.d and IntegerLattice(Q.d, tuple(r.weight for r in ps) + (w,)).rank > len(ps):
                ps.append(RecordedCycle(f"p{len(ps) + 1}", fundamental_cycle(Q, forest, e.id), w))
            else:
                rest.append(e)
        ells: list[RecordedCycle] = []
        for e in rest:
            w = _fundamental_weight(Q, forest, e)
            prior = IntegerLattice(Q.d, tuple(r.weight for r in ps) + tuple(r.weight for r in ells))
            N = prior.order_of(w)
            coeffs = prior.solve(_scale(w, N))
            c, dk = coeffs[: len(ps)], coeffs[len(ps):]
            ell = RecordedCycle(f"l{len(ells) + 1}", fundamental_cycle(Q, forest, e.id), w)
            path = ell.path.power(N)
            for k, r in enumerate(ells):
                path = path.then(r.path.power(-dk[k]))
            for k, r in enumerate(ps):
                path = path.then(r.path.power(-c[k]))
            ells.append(ell)
            gens.append(H1Generator("shortcut", path, ci, (ell.name,), N, tuple(c), tuple(dk)))
        for j in range(len(ps)):
            for k in range(j + 1, len(ps)):
                a, b = ps[j].path, ps[k].path
                # p_k^-1 p_j^-1 p_k p_j, walked right to left
                path = a.then(b).then(a.inverse()).then(b.inverse())
                gens.append(H1Generator("commutator", path, ci, (ps[j].name, ps[k].name)))
        reports.append(
            ComponentReport(
                vertices=comp,
                base_vertex=base,
                lattice=W,
                index=int(W.index()),
                coset_representatives=W.coset_representatives(),
                tree_edges=[eid for eid in forest.tree_edges if Q.edge(eid).tail in members],
                p=ps,
                ell=ells,
            )
        )
    gens.sort(key=lambda g: (g.component, g.kind != "commutator"))
    return GeneratorReport(reports, gens)


def corollary_betti(Q: WeightedQuotientGraph, n: Sequence[int]) -> tuple[int, int]:
    """(beta_0, beta_1) of the window with periodic boundary conditions."""
    if len(n) != Q.d:
        raise DimensionMismatch(f"window has {len(n)} sizes, expected {Q.d}")
    if any(k < 1 for k in n):
        raise ValueError("window sizes must be positive")
    b0 = sum(W.index_mod(n) for W in weight_lattice(Q))
    return b0, (Q.epsilon - Q.nu) * math.prod(n) + b0


class CycleClass(enum.Enum):
    LIFTABLE = "Liftable"
    TOROIDAL = "Toroidal"


def classify_quotient_cycle(Q: WeightedQuotientGraph, c: EdgePath) -> CycleClass:
    """Zero-weight cycles lift to cycles of the periodic graph; others are toroidal."""
    start, end = Q.walk(c)
    if start != end:
        raise NotACycle(f"path runs from {start!r} to {end!r}")
    return CycleClass.LIFTABLE if not any(path_weight(Q, c)) else CycleClass.TOROIDAL


def lift_path(Q: WeightedQuotientGraph, p: EdgePath, start_shift: Sequence[int] | None = None) -> dict:
    """Lift p to the periodic graph as a 1-chain {(edge id, shift): coeff}.

    The edge copy (e, t) runs from (tail, t) to (head, t + w(e)).
    """
    Q.walk(p)
    t = tuple(start_shift) if start_shift is not None else (0,) * Q.d
    chain: dict = {}
    for eid, s in p.steps:
        e = Q.edge(eid)
        if s > 0:
            key, t = (eid, t), _add(t, e.weight)
        else:
            t = _add(t, e.weight, -1)
            key = (eid, t)
        chain[key] = chain.get(key, 0) + s
    return {k: v for k, v in chain.items() if v}


def lifted_boundary(Q: WeightedQuotientGraph, chain: Mapping) -> dict:
    """Boundary {(vertex, shift): coeff} of a lifted 1-chain."""
    out: dict = {}
    for (eid, t), a in chain.items():
        e = Q.edge(eid)
        for key, b in (((e.head, _add(t, e.weight)), 1), ((e.tail, tuple(t)), -1)):
            out[key] = out.get(key, 0) + a * b
    return {k: v for k, v in out.items() if v}
