"""Brute-force reference computations used only by the tests."""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction


def det(rows):
    """Determinant by fraction Gaussian elimination."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    out = Fraction(sign)
    for k in range(n):
        out *= a[k][k]
    return int(out)


def index_by_minors(gens, d):
    """[Z^d : L] as the gcd of the maximal minors; None if they all vanish."""
    if d == 0:
        return 1
    g = 0
    for rows in itertools.combinations(gens, d):
        g = math.gcd(g, det(rows))
    return g or None


def subgroup_size(gens, n):
    """Order of the subgroup of prod Z/n_i generated by the images of gens (BFS)."""
    gens = [tuple(x % k for x, k in zip(g, n)) for g in gens]
    zero = tuple(0 for _ in n)
    seen = {zero}
    queue = deque([zero])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple((a + b) % k for a, b, k in zip(x, g, n))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen)


def matrix_rank(rows):
    """Rank over Q by fraction elimination (dense, for small matrices)."""
    a = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def dense(columns, nrows):
    """Rows of a matrix stored as sparse columns."""
    return [[col.get(i, 0) for col in columns] for i in range(nrows)]


def betti_by_rank(X):
    """beta_q = dim C_q - rank d_q - rank d_{q+1}, with dense ranks."""
    ranks = []
    for q in range(X.dimension + 2):
        if 1 <= q <= X.dimension and X.count(q) and X.count(q - 1):
            ranks.append(matrix_rank(dense(X.boundary(q), X.count(q - 1))))
        else:
            ranks.append(0)
    return [X.count(q) - ranks[q] - ranks[q + 1] for q in range(X.dimension + 1)]
