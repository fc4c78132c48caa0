"""Points of PG(n, q) in canonical homogeneous coordinates.

A point is stored as the tuple of its coordinates scaled so that the
leftmost nonzero entry is 1.  Enumeration is lexicographic in those tuples,
which fixes the dense point indices used everywhere downstream.
"""

from __future__ import annotations

import numpy as np

from .errors import IdenticalPoints, ZeroVector
from .gf import Field

ProjPoint = tuple


def normalize(v, F: Field) -> ProjPoint:
    """Scale v so that its leftmost nonzero coordinate is 1."""
    v = [int(c) for c in v]
    for c in v:
        if c:
            lam = F.inv(c)
            return tuple(F.mul(lam, x) for x in v)
    raise ZeroVector("the zero vector is not a projective point")


def normalize_rows(X, F: Field) -> np.ndarray:
    """Vectorised :func:`normalize` over the rows of a 2-d array (no zero rows)."""
    X = np.asarray(X)
    nz = X != 0
    if not nz.any(axis=1).all():
        raise ZeroVector("zero row in normalize_rows")
    lead = nz.argmax(axis=1)
    scale = F.vinv(X[np.arange(len(X)), lead])
    return F.vmul(X, scale[:, None])


def all_vectors(d: int, q: int) -> np.ndarray:
    """Every vector of GF(q)^d as rows, in lexicographic order."""
    codes = np.arange(q**d, dtype=np.int64)
    out = np.empty((q**d, d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        out[:, j] = codes % q
        codes //= q
    return out


def point_array(n: int, F: Field) -> np.ndarray:
    """Canonical points of PG(n, q) as an int array, lexicographically ordered."""
    if n < 1:
        raise ValueError("projective dimension must be >= 1")
    vecs = all_vectors(n + 1, F.q)
    nz = vecs != 0
    has = nz.any(axis=1)
    lead = nz.argmax(axis=1)
    keep = has & (vecs[np.arange(len(vecs)), lead] == 1)
    return vecs[keep]


def enumerate_points(n: int, F: Field) -> list[ProjPoint]:
    return [tuple(int(c) for c in row) for row in point_array(n, F)]


def encode_rows(X, q: int) -> np.ndarray:
    """Base-q integer code of each row; increasing codes = lexicographic order."""
    X = np.asarray(X, dtype=np.int64)
    code = np.zeros(len(X), dtype=np.int64)
    for j in range(X.shape[1]):
        code = code * q + X[:, j]
    return code


class PointIndex:
    """Bijection between a lexicographically sorted canonical point list and 0..N-1."""

    def __init__(self, points: np.ndarray, q: int):
        self.points = np.asarray(points)
        self.q = q
        self.codes = encode_rows(self.points, q)
        if len(self.codes) > 1 and not (np.diff(self.codes) > 0).all():
            raise ValueError("points must be sorted and distinct")

    def __len__(self):
        return len(self.points)

    def lookup(self, X) -> np.ndarray:
        """Indices of canonical rows X; -1 where a row is not in the list."""
        codes = encode_rows(np.atleast_2d(X), self.q)
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        return np.where(self.codes[pos] == codes, pos, -1)

    def index(self, point) -> int:
        i = int(self.lookup(np.array([point]))[0])
        if i < 0:
            raise KeyError(point)
        return i

    def point(self, i: int) -> ProjPoint:
        return tuple(int(c) for c in self.points[i])


def line_through(u, v, F: Field) -> set[ProjPoint]:
    """The q+1 points of the projective line spanned by u and v."""
    nu, nv = normalize(u, F), normalize(v, F)
    if nu == nv:
        raise IdenticalPoints(f"{nu} spans no line with itself")
    pts = {nu}
    for lam in F.elements():
        pts.add(normalize([F.add(F.mul(lam, a), b) for a, b in zip(nu, nv)], F))
    return pts
