"""Coordinate models of the classical generalized quadrangles.

=========  ======================================  ==========  =============
family     point set                               order       field
=========  ======================================  ==========  =============
q5minus    Q-(5,q): x0x1+x2x3+x4^2+b x4x5+c x5^2   (q, q^2)    GF(q)
w          W(q): all of PG(3,q), symplectic lines  (q, q)      GF(q)
q4         Q(4,q): x0x1+x2x3+x4^2                  (q, q)      GF(q)
h3 / h4    H(n,q^2): sum x_i^(q+1)                 (q^2, q) /  GF(q^2)
                                                   (q^2, q^3)
=========  ======================================  ==========  =============

Points are the singular points of PG(n, F) in lexicographic order of their
canonical coordinates; lines are the totally singular projective lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPrimePower, TooLarge, WrongGeometry
from .geometry import Quadrangle
from .gf import Field, make_field, prime_power
from .projective import PointIndex, normalize_rows, point_array

QUADRATIC = ("elliptic-quadratic", "parabolic-quadratic")

CAPS = {"q5minus": 13, "w": 16, "q4": 16, "h3": 4, "h4": 3}
FAMILIES = tuple(CAPS)


@dataclass(frozen=True)
class FormSpec:
    """A sesquilinear or quadratic form on GF(q)^(n+1).

    ``terms`` lists ``(i, j, coeff)`` monomials ``coeff * x_i * x_j`` of a
    quadratic form (i <= j) or of the alternating form ``x_i y_j`` pairs for
    the symplectic case.  ``bc`` holds the elliptic pair when relevant.
    """

    kind: str
    n: int
    field: Field = field(repr=False)
    terms: tuple = ()
    bc: tuple | None = None

    @property
    def dim(self) -> int:
        return self.n + 1

    def gram(self) -> np.ndarray:
        """Matrix G with B(u, v) = sum_ij u_i G_ij v_j (v conjugated for Hermitian)."""
        F, d = self.field, self.dim
        G = np.zeros((d, d), dtype=np.int64)
        if self.kind == "hermitian":
            return np.eye(d, dtype=np.int64)
        for i, j, c in self.terms:
            if self.kind == "symplectic":
                G[i, j] = F.add(int(G[i, j]), c)
                G[j, i] = F.add(int(G[j, i]), F.neg(c))
            elif i == j:
                G[i, i] = F.add(int(G[i, i]), F.add(c, c))
            else:
                G[i, j] = F.add(int(G[i, j]), c)
                G[j, i] = F.add(int(G[j, i]), c)
        return G

    def value(self, X) -> np.ndarray:
        """Q(x) for quadratic forms, h(x, x) for Hermitian, 0 for symplectic."""
        F = self.field
        X = np.atleast_2d(X)
        acc = np.zeros(len(X), dtype=np.int64)
        if self.kind == "symplectic":
            return acc
        if self.kind == "hermitian":
            for i in range(self.dim):
                acc = F.vadd(acc, F.vmul(X[:, i], F.vfrob(X[:, i])))
            return acc
        for i, j, c in self.terms:
            acc = F.vadd(acc, F.vmul(c, F.vmul(X[:, i], X[:, j])))
        return acc

    def polar_image(self, V) -> np.ndarray:
        """Rows W(v) such that B(u, v) = dot(u, W(v))."""
        F = self.field
        V = np.atleast_2d(V)
        if self.kind == "hermitian":
            return F.vfrob(V)
        G = self.gram()
        W = np.zeros_like(V)
        for i in range(self.dim):
            for j in range(self.dim):
                if G[i, j]:
                    W[:, i] = F.vadd(W[:, i], F.vmul(int(G[i, j]), V[:, j]))
        return W

    def bilinear(self, U, V) -> np.ndarray:
        return self.field.dot(np.atleast_2d(U), self.polar_image(V))

    def radical(self) -> list[tuple]:
        """Basis of the radical of the polarization."""
        return nullspace(self.field, self.gram())

    def is_nondegenerate(self) -> bool:
        """True when the radical holds no nonzero singular vector.

        For quadratic forms in characteristic 2 the polarization of a
        parabolic form has a one-dimensional radical (the nucleus) on which
        Q does not vanish; that form is still nondegenerate.
        """
        basis = self.radical()
        if not basis:
            return True
        if self.kind not in QUADRATIC or len(basis) > 2:
            return False
        F = self.field
        B = np.array(basis)
        for coeffs in np.ndindex(*([F.q] * len(basis))):
            if not any(coeffs):
                continue
            v = np.zeros(self.dim, dtype=np.int64)
            for c, b in zip(coeffs, B):
                v = F.vadd(v, F.vmul(c, b))
            if int(self.value(v)[0]) == 0:
                return False
        return True


def nullspace(F: Field, M) -> list[tuple]:
    """Basis of {v : M v = 0} over F, by Gauss-Jordan elimination."""
    A = [[int(x) for x in row] for row in np.asarray(M)]
    rows, cols = len(A), len(A[0])
    pivots, r = [], 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(A[i][fc])
        basis.append(tuple(v))
    return basis


def elliptic_pair(F: Field) -> tuple[int, int]:
    """Smallest (b, c) in lexicographic order with x^2 + b x + c irreducible."""
    xs = np.arange(F.q)
    sq = F.vmul(xs, xs)
    for b in range(F.q):
        bx = F.vmul(b, xs)
        for c in range(F.q):
            if (F.vadd(F.vadd(sq, bx), c) != 0).all():
                return b, c
    raise AssertionError("no irreducible quadratic")  # pragma: no cover


def _field_for(q: int, cap: int, family: str) -> Field:
    pk = prime_power(q)
    if pk is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > cap:
        raise TooLarge(f"{family}: q={q} exceeds the cap {cap}")
    return make_field(*pk)


def singular_lines(form: FormSpec, points: np.ndarray) -> np.ndarray:
    """All totally singular lines spanned by the singular points ``points``.

    For a point u with leading coordinate i, every line through u meets the
    hyperplane x_i = 0 in exactly one point, so the lines through u are in
    bijection with the singular points w of that hyperplane with B(u, w) = 0.
    A line is emitted once, from its smallest point; since any hyperplane
    point with leading index >= i sorts before u, only candidates with a
    smaller leading index are paired.
    """
    F, q = form.field, form.field.q
    index = PointIndex(points, q)
    lead = (points != 0).argmax(axis=1)
    W = form.polar_image(points)
    lam = np.arange(q)
    out = []
    for i in range(1, form.dim):
        group = np.flatnonzero(lead == i)
        cand = np.flatnonzero((lead < i) & (points[:, i] == 0))
        if not len(group) or not len(cand):
            continue
        chunk = max(1, (1 << 22) // len(cand))
        for a in range(0, len(group), chunk):
            us = group[a:a + chunk]
            D = F.dot(points[us], W[cand])
            ui, wi = np.nonzero(D == 0)
            if not len(ui):
                continue
            u_idx, w_idx = us[ui], cand[wi]
            for b in range(0, len(u_idx), 4096):
                uu, ww = u_idx[b:b + 4096], w_idx[b:b + 4096]
                vec = F.vadd(points[ww][:, None, :], F.vmul(lam[None, :, None], points[uu][:, None, :]))
                flat = normalize_rows(vec.reshape(-1, form.dim), F)
                others = index.lookup(flat).reshape(len(uu), q)
                if (others < 0).any():
                    raise AssertionError("line leaves the singular point set")
                keep = others.min(axis=1) > uu
                out.append(np.concatenate([uu[keep, None], others[keep]], axis=1))
    lines = np.concatenate(out) if out else np.zeros((0, q + 1), dtype=np.int64)
    lines.sort(axis=1)
    return lines[np.lexsort(lines.T[::-1])]


def _build(form, s, t, label, family, q) -> Quadrangle:
    pts = point_array(form.n, form.field)
    sing = pts[form.value(pts) == 0]
    lines = singular_lines(form, sing)
    meta = {"family": family, "q": q, "field": form.field, "coords": sing, "form": form}
    return Quadrangle(s, t, lines, label, meta=meta)


def elliptic_form(q: int) -> FormSpec:
    F = _field_for(q, CAPS["q5minus"], "q5minus")
    b, c = elliptic_pair(F)
    terms = ((0, 1, 1), (2, 3, 1), (4, 4, 1), (4, 5, b), (5, 5, c))
    return FormSpec("elliptic-quadratic", 5, F, tuple(t for t in terms if t[2]), (b, c))


def elliptic_q5(q: int) -> Quadrangle:
    """Q-(5,q), order (q, q^2)."""
    return _build(elliptic_form(q), q, q * q, f"Q-(5,{q})", "q5minus", q)


def symplectic_w(q: int) -> Quadrangle:
    """W(q): PG(3,q) with the lines isotropic for x0y1 - x1y0 + x2y3 - x3y2."""
    F = _field_for(q, CAPS["w"], "w")
    form = FormSpec("symplectic", 3, F, ((0, 1, 1), (2, 3, 1)))
    return _build(form, q, q, f"W({q})", "w", q)


def parabolic_q4(q: int) -> Quadrangle:
    """Q(4,q), order (q, q)."""
    F = _field_for(q, CAPS["q4"], "q4")
    form = FormSpec("parabolic-quadratic", 4, F, ((0, 1, 1), (2, 3, 1), (4, 4, 1)))
    return _build(form, q, q, f"Q(4,{q})", "q4", q)


def hermitian_h(n: int, q: int) -> Quadrangle:
    """H(n, q^2) for n in {3, 4}: orders (q^2, q) and (q^2, q^3)."""
    if n not in (3, 4):
        raise ValueError("Hermitian quadrangles need n in {3, 4}")
    family = f"h{n}"
    pk = prime_power(q)
    if pk is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > CAPS[family]:
        raise TooLarge(f"{family}: q={q} exceeds the cap {CAPS[family]}")
    F = make_field(pk[0], 2 * pk[1])
    form = FormSpec("hermitian", n, F)
    t = q if n == 3 else q**3
    return _build(form, q * q, t, f"H({n},{q * q})", family, q)


def build(family: str, q: int) -> Quadrangle:
    if family == "q5minus":
        return elliptic_q5(q)
    if family == "w":
        return symplectic_w(q)
    if family == "q4":
        return parabolic_q4(q)
    if family in ("h3", "h4"):
        return hermitian_h(int(family[1]), q)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def form_collinear(Q: Quadrangle, us, vs) -> np.ndarray:
    """Collinearity read off the defining form: B(u, v) = 0 (u == v counts)."""
    form, coords = Q.meta["form"], Q.meta["coords"]
    us, vs = np.asarray(us), np.asarray(vs)
    F = form.field
    U, W = coords[us], form.polar_image(coords[vs])
    acc = np.zeros(len(us), dtype=np.int64)
    for j in range(form.dim):
        acc = F.vadd(acc, F.vmul(U[:, j], W[:, j]))
    return acc == 0


def elliptic_q3_section(Q: Quadrangle) -> frozenset:
    """The q^2+1 points of Q-(5,q) with x2 = x3 = 0, an elliptic quadric Q-(3,q)."""
    if Q.meta.get("family") != "q5minus":
        raise WrongGeometry(f"{Q.label or 'geometry'} was not built by elliptic_q5")
    coords = Q.meta["coords"]
    return frozenset(np.flatnonzero((coords[:, 2] == 0) & (coords[:, 3] == 0)).tolist())
