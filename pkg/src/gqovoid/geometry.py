"""Generalized quadrangles as indexed incidence structures.

Point sets are handled internally as packed little-endian bit masks
(``uint8`` arrays of length ``ceil(P/8)``; bit ``i`` is point ``i``), which
keeps perp/cover computations and collinearity tests bit-parallel.  The
public set operations return ``frozenset`` of point indices.

Convention: a point is collinear with itself, so ``x`` belongs to ``x^perp``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AxiomFailure,
    DuplicatePointOnLine,
    EmptySetForPerp,
    ExhaustiveTooLarge,
    InconsistentCounts,
    IndexOutOfRange,
)

BITMATRIX_LIMIT = 32768
EXHAUSTIVE_PAIR_LIMIT = 500
EXHAUSTIVE_TRIPLE_LIMIT = 400
DEFAULT_AXIOM_SAMPLES = 100_000
DEFAULT_PAIR_SAMPLES = 10_000
TRIANGLE_WORK_BUDGET = 5 * 10**8


def point_count(s: int, t: int) -> int:
    return (s + 1) * (s * t + 1)


def line_count(s: int, t: int) -> int:
    return (t + 1) * (s * t + 1)


def popcount(masks) -> np.ndarray | int:
    """Number of set bits per mask (last axis)."""
    counts = np.bitwise_count(np.asarray(masks, dtype=np.uint8)).sum(axis=-1, dtype=np.int64)
    return int(counts) if np.ndim(counts) == 0 else counts


class Quadrangle:
    """Point-line incidence structure of order (s, t) on points 0..P-1.

    Build with :func:`from_lines`.  Nothing here checks the GQ axioms; that
    is :func:`verify_axioms`.  ``meta`` carries construction data such as
    the coordinate array and field of a classical model.
    """

    def __init__(self, s, t, lines, label="", *, backend="auto", meta=None):
        self.s = int(s)
        self.t = int(t)
        self.P = point_count(self.s, self.t)
        self.label = label
        self.meta = dict(meta or {})
        if len(lines) == 0:
            raise InconsistentCounts("no lines given")
        arr = np.array([list(map(int, ln)) for ln in lines], dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != self.s + 1:
            raise InconsistentCounts(f"every line must have s+1 = {self.s + 1} points")
        if arr.min() < 0 or arr.max() >= self.P:
            raise InconsistentCounts(f"point index outside 0..{self.P - 1}")
        arr.sort(axis=1)
        dup = (np.diff(arr, axis=1) == 0).any(axis=1)
        if dup.any():
            bad = int(np.flatnonzero(dup)[0])
            raise DuplicatePointOnLine(f"line {bad} repeats a point: {arr[bad].tolist()}")
        arr.setflags(write=False)
        self.lines = arr
        self.L = len(arr)

        flat = arr.ravel()
        order = np.argsort(flat, kind="stable")
        owners = order // (self.s + 1)
        deg = np.bincount(flat, minlength=self.P)
        self.degrees = deg
        splits = np.cumsum(deg)[:-1]
        self.point_lines = tuple(np.split(owners, splits))
        self._regular = bool((deg == deg[0]).all())
        self._pl_array = np.stack(self.point_lines) if self._regular and deg[0] > 0 else None

        self.nbytes = (self.P + 7) // 8
        if backend == "auto":
            backend = "bitmatrix" if self.P <= BITMATRIX_LIMIT else "lines"
        if backend not in ("bitmatrix", "lines"):
            raise ValueError(f"unknown collinearity backend {backend!r}")
        self.backend = backend
        self._adj = self._build_bitmatrix() if backend == "bitmatrix" else None
        self._line_sets = None if backend == "bitmatrix" else [frozenset(map(int, pl)) for pl in self.point_lines]

    def __repr__(self):
        return f"Quadrangle({self.label or '?'}, s={self.s}, t={self.t}, P={self.P}, L={self.L})"

    # -- construction --------------------------------------------------------

    def _neighbourhood_bool(self, points) -> np.ndarray:
        out = np.zeros((len(points), self.P), dtype=bool)
        if self._pl_array is not None:
            nb = self.lines[self._pl_array[points]].reshape(len(points), -1)
            out[np.arange(len(points))[:, None], nb] = True
        else:
            for i, u in enumerate(points):
                out[i, self.lines[self.point_lines[u]].ravel()] = True
        out[np.arange(len(points)), points] = True
        return out

    def _build_bitmatrix(self) -> np.ndarray:
        adj = np.empty((self.P, self.nbytes), dtype=np.uint8)
        chunk = max(1, min(self.P, (1 << 26) // max(self.P, 1)))
        for a in range(0, self.P, chunk):
            pts = np.arange(a, min(self.P, a + chunk))
            adj[pts] = np.packbits(self._neighbourhood_bool(pts), axis=1, bitorder="little")
        adj.setflags(write=False)
        return adj

    # -- masks ---------------------------------------------------------------

    def _check(self, u) -> int:
        u = int(u)
        if not 0 <= u < self.P:
            raise IndexOutOfRange(f"point {u} outside 0..{self.P - 1}")
        return u

    def mask_of(self, points) -> np.ndarray:
        b = np.zeros(self.P, dtype=bool)
        idx = np.fromiter((self._check(u) for u in points), dtype=np.int64)
        b[idx] = True
        return np.packbits(b, bitorder="little")

    def indices_of(self, mask) -> np.ndarray:
        return np.flatnonzero(np.unpackbits(mask, count=self.P, bitorder="little"))

    def bools_of(self, mask) -> np.ndarray:
        return np.unpackbits(mask, count=self.P, bitorder="little").astype(bool)

    def full_mask(self) -> np.ndarray:
        return np.packbits(np.ones(self.P, dtype=bool), bitorder="little")

    def row(self, u) -> np.ndarray:
        """Mask of u^perp (u included)."""
        u = self._check(u)
        if self._adj is not None:
            return self._adj[u]
        return np.packbits(self._neighbourhood_bool(np.array([u]))[0], bitorder="little")

    def rows(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64)
        if self._adj is not None:
            return self._adj[points]
        if len(points) == 0:
            return np.zeros((0, self.nbytes), dtype=np.uint8)
        return np.packbits(self._neighbourhood_bool(points), axis=1, bitorder="little")

    def line_mask(self, ell) -> np.ndarray:
        return self.mask_of(self.lines[ell])

    # -- collinearity ----------------------------------------------------------

    def collinear(self, u, v) -> bool:
        u, v = self._check(u), self._check(v)
        if u == v:
            return True
        if self._adj is not None:
            return bool((self._adj[u, v >> 3] >> (v & 7)) & 1)
        return not self._line_sets[u].isdisjoint(self._line_sets[v])

    def collinear_many(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if self._adj is not None:
            return ((self._adj[us, vs >> 3] >> (vs & 7).astype(np.uint8)) & 1).astype(bool)
        return np.array([self.collinear(u, v) for u, v in zip(us, vs)], dtype=bool)

    def line_through(self, u, v) -> int | None:
        """Index of the line joining distinct collinear u, v, else None."""
        u, v = self._check(u), self._check(v)
        common = np.intersect1d(self.point_lines[u], self.point_lines[v])
        return int(common[0]) if len(common) and u != v else None

    def lines_through(self, u) -> np.ndarray:
        return self.point_lines[self._check(u)]

    # -- perp calculus ---------------------------------------------------------

    def perp_mask(self, R) -> np.ndarray:
        R = list(R)
        if not R:
            raise EmptySetForPerp("perp of the empty set is undefined")
        return np.bitwise_and.reduce(self.rows([self._check(u) for u in R]), axis=0)

    def cover_mask(self, R) -> np.ndarray:
        R = [self._check(u) for u in R]
        if not R:
            return np.zeros(self.nbytes, dtype=np.uint8)
        return np.bitwise_or.reduce(self.rows(R), axis=0)

    def perp(self, R) -> frozenset:
        return frozenset(self.indices_of(self.perp_mask(R)).tolist())

    def perp_strict(self, R) -> frozenset:
        R = set(R)
        return self.perp(R) - R

    def cover(self, R) -> frozenset:
        return frozenset(self.indices_of(self.cover_mask(R)).tolist())

    def cover_strict(self, R) -> frozenset:
        R = set(R)
        return self.cover(R) - R


def from_lines(s, t, lines, label="", *, backend="auto", meta=None) -> Quadrangle:
    return Quadrangle(s, t, lines, label, backend=backend, meta=meta)


# -- axiom verification ---------------------------------------------------------


@dataclass
class AxiomCheck:
    name: str
    passed: bool
    mode: str = "exhaustive"
    checked: int = 0
    witness: tuple | None = None
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{self.name:<22} {status}  ({self.mode}, {self.checked} checked)"
        if self.witness is not None:
            text += f"  witness={self.witness}"
        if self.detail:
            text += f"  {self.detail}"
        return text


@dataclass
class AxiomReport:
    checks: list[AxiomCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def _check_counts(Q):
    want = line_count(Q.s, Q.t)
    ok = Q.L == want
    return AxiomCheck("counts", ok, checked=1, witness=None if ok else (Q.L, want),
                      detail="" if ok else f"L={Q.L}, expected (t+1)(st+1)={want}")


def _check_degrees(Q):
    bad = np.flatnonzero(Q.degrees != Q.t + 1)
    if len(bad):
        u = int(bad[0])
        return AxiomCheck("degrees", False, checked=Q.P, witness=(u, int(Q.degrees[u])),
                          detail=f"point {u} lies on {int(Q.degrees[u])} lines, expected t+1={Q.t + 1}")
    return AxiomCheck("degrees", True, checked=Q.P)


def _pair_on_two_lines(Q, u):
    seen = {}
    for ell in Q.point_lines[u]:
        for v in Q.lines[ell]:
            v = int(v)
            if v != u and v in seen:
                return (u, v, seen[v], int(ell))
            seen[v] = int(ell)
    return None


def _check_unique_common_line(Q):
    expected = 1 + Q.s * Q.degrees
    if Q._adj is not None:
        sizes = popcount(Q._adj)
        suspects = np.flatnonzero(sizes != expected)
    else:
        suspects = range(Q.P)
    for u in suspects:
        w = _pair_on_two_lines(Q, int(u))
        if w is not None:
            return AxiomCheck("unique_common_line", False, checked=Q.P, witness=w,
                              detail=f"points {w[0]},{w[1]} share lines {w[2]} and {w[3]}")
    return AxiomCheck("unique_common_line", True, checked=Q.P)


def _check_unique_perpendicular(Q, exhaustive, samples, rng):
    """For x not on line ell, exactly one point of ell is collinear with x."""
    if exhaustive:
        checked = 0
        for x in range(Q.P):
            xb = Q.bools_of(Q.row(x))
            counts = xb[Q.lines].sum(axis=1)
            off = ~(Q.lines == x).any(axis=1)
            checked += int(off.sum())
            bad = np.flatnonzero(off & (counts != 1))
            if len(bad):
                ell = int(bad[0])
                return AxiomCheck("unique_perpendicular", False, checked=checked, witness=(x, ell),
                                  detail=f"point {x} is collinear with {int(counts[ell])} points of line {ell}")
        return AxiomCheck("unique_perpendicular", True, checked=checked)
    xs, ls = [], []
    while len(xs) < samples:
        x, ell = rng.randrange(Q.P), rng.randrange(Q.L)
        if x not in Q.lines[ell]:
            xs.append(x)
            ls.append(ell)
    xs = np.array(xs, dtype=np.int64)
    pts = Q.lines[np.array(ls, dtype=np.int64)]
    counts = Q.collinear_many(np.repeat(xs, Q.s + 1), pts.ravel()).reshape(pts.shape).sum(axis=1)
    bad = np.flatnonzero(counts != 1)
    if len(bad):
        i = int(bad[0])
        return AxiomCheck("unique_perpendicular", False, mode="sampled", checked=samples,
                          witness=(int(xs[i]), ls[i]),
                          detail=f"point {int(xs[i])} is collinear with {int(counts[i])} points of line {ls[i]}")
    return AxiomCheck("unique_perpendicular", True, mode="sampled", checked=samples)


def _check_no_triangles(Q, exhaustive, samples, rng):
    """Every collinear pair {a, b} has {a,b}^perp equal to the line through them."""
    pairs = list(itertools.combinations(range(Q.s + 1), 2))
    if exhaustive:
        chunk = max(1, (1 << 24) // max(Q.nbytes, 1))
        for i, j in pairs:
            for a in range(0, Q.L, chunk):
                block = Q.lines[a:a + chunk]
                sizes = popcount(Q.rows(block[:, i]) & Q.rows(block[:, j]))
                bad = np.flatnonzero(sizes != Q.s + 1)
                if len(bad):
                    ell = a + int(bad[0])
                    u, v = int(Q.lines[ell, i]), int(Q.lines[ell, j])
                    extra = sorted(Q.perp([u, v]) - set(Q.lines[ell].tolist()))
                    return AxiomCheck("no_triangles", False, checked=Q.L * len(pairs),
                                      witness=(u, v, extra[0]) if extra else (u, v),
                                      detail=f"{{{u},{v}}}^perp has {int(sizes[bad[0]])} points, expected s+1")
        return AxiomCheck("no_triangles", True, checked=Q.L * len(pairs))
    drawn = []
    for _ in range(samples):
        ell = rng.randrange(Q.L)
        i, j = pairs[rng.randrange(len(pairs))]
        drawn.append((int(Q.lines[ell, i]), int(Q.lines[ell, j]), ell))
    drawn = np.array(drawn, dtype=np.int64)
    for a in range(0, samples, 8192):
        blk = drawn[a:a + 8192]
        sizes = popcount(Q.rows(blk[:, 0]) & Q.rows(blk[:, 1]))
        bad = np.flatnonzero(sizes != Q.s + 1)
        if len(bad):
            u, v, ell = (int(c) for c in blk[bad[0]])
            extra = sorted(Q.perp([u, v]) - set(Q.lines[ell].tolist()))
            return AxiomCheck("no_triangles", False, mode="sampled", checked=samples,
                              witness=(u, v, extra[0]) if extra else (u, v),
                              detail=f"{{{u},{v}}}^perp has {int(sizes[bad[0]])} points, expected s+1")
    return AxiomCheck("no_triangles", True, mode="sampled", checked=samples)


def verify_axioms(Q: Quadrangle, *, exhaustive_limit=EXHAUSTIVE_PAIR_LIMIT,
                  samples=DEFAULT_AXIOM_SAMPLES, seed=0) -> AxiomReport:
    """Check the GQ axioms, returning one entry per axiom (never raises).

    The unique-perpendicular axiom is checked over all (point, line) pairs
    when ``P <= exhaustive_limit`` and over ``samples`` seeded random pairs
    otherwise.  The triangle check is exhaustive whenever affordable.
    """
    rng = random.Random(seed)
    report = AxiomReport([_check_counts(Q), _check_degrees(Q), _check_unique_common_line(Q)])
    exhaustive = Q.P <= exhaustive_limit
    report.checks.append(_check_unique_perpendicular(Q, exhaustive, samples, rng))
    work = Q.L * (Q.s + 1) * Q.s // 2 * Q.nbytes
    report.checks.append(_check_no_triangles(Q, exhaustive or work <= TRIANGLE_WORK_BUDGET, samples, rng))
    return report


# -- perp identities ------------------------------------------------------------


@dataclass
class PerpIdentityReport:
    eq1_checked: int
    eq1_failures: list
    eq2_checked: int
    eq2_mode: str
    eq2_failures: list

    @property
    def ok(self) -> bool:
        return not self.eq1_failures and not self.eq2_failures


def _noncollinear_pairs(Q, exhaustive, n_pairs, rng):
    if exhaustive:
        for u in range(Q.P):
            others = np.flatnonzero(~Q.bools_of(Q.row(u)))
            others = others[others > u]
            if len(others):
                yield np.full(len(others), u), others
        return
    us, vs = [], []
    while len(us) < n_pairs:
        u, v = rng.randrange(Q.P), rng.randrange(Q.P)
        if not Q.collinear(u, v):
            us.append(u)
            vs.append(v)
    yield np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)


def check_perp_identities(Q: Quadrangle, *, pair_limit=EXHAUSTIVE_PAIR_LIMIT,
                          n_pairs=DEFAULT_PAIR_SAMPLES, seed=0) -> PerpIdentityReport:
    """|u^perp_o| = s(t+1) for every point; |{u,v}^perp_o| = t+1 for non-collinear pairs."""
    rng = random.Random(seed)
    eq1 = []
    for a in range(0, Q.P, 4096):
        pts = np.arange(a, min(Q.P, a + 4096))
        sizes = popcount(Q.rows(pts)) - 1
        eq1 += [(int(u), int(n)) for u, n in zip(pts, sizes) if n != Q.s * (Q.t + 1)]
    exhaustive = Q.P <= pair_limit
    eq2, checked = [], 0
    for us, vs in _noncollinear_pairs(Q, exhaustive, n_pairs, rng):
        sizes = popcount(Q.rows(us) & Q.rows(vs))
        checked += len(us)
        eq2 += [(int(u), int(v), int(n)) for u, v, n in zip(us, vs, sizes) if n != Q.t + 1]
    return PerpIdentityReport(Q.P, eq1, checked, "exhaustive" if exhaustive else "sampled", eq2)


# -- local sparsity ---------------------------------------------------------------


@dataclass
class SparsityResult:
    verdict: bool
    mode: str
    checked: int
    max_perp: int
    witness: tuple | None = None
    witness_perp_size: int | None = None

    def describe(self) -> str:
        if self.verdict:
            scope = "all" if self.mode == "exhaustive" else "sampled"
            note = "" if self.mode == "exhaustive" else " (no counterexample found)"
            return (f"locally sparse: TRUE{note}; {scope} {self.checked} triples, "
                    f"max |R^perp_o| = {self.max_perp}")
        return (f"locally sparse: FALSE; witness triple {self.witness} has "
                f"|R^perp_o| = {self.witness_perp_size}")


def locally_sparse(Q: Quadrangle, mode="exhaustive", n_triples=DEFAULT_AXIOM_SAMPLES,
                   seed=0) -> SparsityResult:
    """Check that pairwise non-collinear triples have at most s+1 common neighbours.

    Triples with a collinear pair are skipped.  In sampled mode exactly
    ``n_triples`` pairwise non-collinear triples are examined; a TRUE verdict
    then only means no counterexample was found.
    """
    bound = Q.s + 1
    if mode == "exhaustive":
        if Q.P > EXHAUSTIVE_TRIPLE_LIMIT:
            raise ExhaustiveTooLarge(f"exhaustive triple check needs P <= {EXHAUSTIVE_TRIPLE_LIMIT}, got {Q.P}")
        checked, worst = 0, 0
        idx = np.arange(Q.P)
        for u in range(Q.P):
            far_u = ~Q.bools_of(Q.row(u))
            for v in np.flatnonzero(far_u & (idx > u)):
                v = int(v)
                far = far_u & ~Q.bools_of(Q.row(v)) & (idx > v)
                ws = np.flatnonzero(far)
                if not len(ws):
                    continue
                sizes = popcount(Q.row(u) & Q.row(v) & Q.rows(ws))
                checked += len(ws)
                worst = max(worst, int(sizes.max()))
                bad = np.flatnonzero(sizes > bound)
                if len(bad):
                    w = int(ws[bad[0]])
                    return SparsityResult(False, mode, checked, worst, (u, v, w), int(sizes[bad[0]]))
        return SparsityResult(True, mode, checked, worst)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if n_triples < 1:
        raise ValueError("n_triples must be >= 1")
    rng = random.Random(seed)
    checked, worst = 0, 0
    while checked < n_triples:
        batch = 2 * (n_triples - checked)
        trip = np.array([[rng.randrange(Q.P) for _ in range(3)] for _ in range(batch)], dtype=np.int64)
        u, v, w = trip.T
        ok = ~(Q.collinear_many(u, v) | Q.collinear_many(u, w) | Q.collinear_many(v, w))
        trip = trip[ok][: n_triples - checked]
        for a in range(0, len(trip), 8192):
            blk = trip[a:a + 8192]
            sizes = popcount(Q.rows(blk[:, 0]) & Q.rows(blk[:, 1]) & Q.rows(blk[:, 2]))
            worst = max(worst, int(sizes.max()))
            bad = np.flatnonzero(sizes > bound)
            if len(bad):
                i = int(bad[0])
                return SparsityResult(False, mode, checked + i + 1, worst,
                                      tuple(int(c) for c in blk[i]), int(sizes[i]))
            checked += len(blk)
    return SparsityResult(True, mode, checked, worst)


# -- duality ----------------------------------------------------------------------


def dualize(Q: Quadrangle, *, check=True) -> Quadrangle:
    """Swap points and lines: dual point j is line j of Q, dual line u is the pencil at u."""
    if check:
        report = verify_axioms(Q)
        if not report.ok:
            raise AxiomFailure(f"cannot dualize {Q.label or 'input'}: axioms fail", report)
    label = Q.label[5:-1] if Q.label.startswith("dual(") and Q.label.endswith(")") else f"dual({Q.label})"
    return Quadrangle(Q.t, Q.s, [Q.point_lines[u] for u in range(Q.P)], label,
                      meta={"dual_of": Q.label})
