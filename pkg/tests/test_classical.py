import itertools

import numpy as np
import pytest

from conftest import geometry
from gqovoid import errors
from gqovoid.classical import (
    CAPS,
    FormSpec,
    build,
    elliptic_form,
    elliptic_pair,
    elliptic_q3_section,
    form_collinear,
)
from gqovoid.geometry import dualize, line_count, point_count, verify_axioms
from gqovoid.gf import field_of_order, make_field
from gqovoid.ovoid import is_maximal, is_partial_ovoid
from gqovoid.projective import enumerate_points, line_through

ORDERS = {
    ("q5minus", 2): (2, 4), ("q5minus", 3): (3, 9), ("q5minus", 4): (4, 16),
    ("w", 2): (2, 2), ("w", 3): (3, 3), ("w", 4): (4, 4),
    ("q4", 2): (2, 2), ("q4", 3): (3, 3), ("q4", 4): (4, 4),
    ("h3", 2): (4, 2), ("h4", 2): (4, 8),
}


# -- oracle: scalar form evaluation and collinear-pair spanning --------------------


def scalar_value(family, F, x, bc=None):
    """Quadratic or Hermitian form written out term by term."""
    m, a = F.mul, F.add
    if family == "q5minus":
        b, c = bc
        v = a(m(x[0], x[1]), m(x[2], x[3]))
        v = a(v, m(x[4], x[4]))
        v = a(v, m(b, m(x[4], x[5])))
        return a(v, m(c, m(x[5], x[5])))
    if family == "q4":
        return a(a(m(x[0], x[1]), m(x[2], x[3])), m(x[4], x[4]))
    if family in ("h3", "h4"):
        v = 0
        for xi in x:
            v = a(v, m(xi, F.frobenius(xi)))
        return v
    return 0


def scalar_polar(family, F, x, y, bc=None):
    """B(x, y) for the form of each family, independently of the Gram matrix code."""
    if family == "w":
        s = F.sub
        return F.add(s(F.mul(x[0], y[1]), F.mul(x[1], y[0])),
                     s(F.mul(x[2], y[3]), F.mul(x[3], y[2])))
    if family in ("h3", "h4"):
        v = 0
        for xi, yi in zip(x, y):
            v = F.add(v, F.mul(xi, F.frobenius(yi)))
        return v
    Q = lambda z: scalar_value(family, F, z, bc)
    xy = tuple(F.add(u, w) for u, w in zip(x, y))
    return F.sub(F.sub(Q(xy), Q(x)), Q(y))


def oracle_lines(family, q):
    if family in ("h3", "h4"):
        F, n = field_of_order(q * q), int(family[1])
    else:
        F, n = field_of_order(q), {"q5minus": 5, "w": 3, "q4": 4}[family]
    bc = elliptic_pair(F) if family == "q5minus" else None
    pts = [p for p in enumerate_points(n, F) if scalar_value(family, F, p, bc) == 0]
    index = {p: i for i, p in enumerate(pts)}
    lines = set()
    for u, v in itertools.combinations(pts, 2):
        if scalar_polar(family, F, u, v, bc) == 0:
            ln = line_through(u, v, F)
            assert all(scalar_value(family, F, p, bc) == 0 for p in ln)
            lines.add(frozenset(index[p] for p in ln))
    return len(pts), lines


# -- counts and axioms -------------------------------------------------------------


@pytest.mark.parametrize("family,q", sorted(ORDERS))
def test_counts_and_axioms(family, q):
    Q = geometry(family, q)
    s, t = ORDERS[family, q]
    assert (Q.s, Q.t) == (s, t)
    assert Q.P == point_count(s, t) == (s + 1) * (s * t + 1)
    assert Q.L == line_count(s, t) == (t + 1) * (s * t + 1)
    assert verify_axioms(Q).ok


@pytest.mark.parametrize("family,q", [("q5minus", 2), ("q5minus", 3), ("w", 2), ("w", 3),
                                      ("q4", 2), ("q4", 3), ("h3", 2), ("w", 4), ("q4", 4)])
def test_lines_match_pair_spanning_oracle(family, q):
    Q = geometry(family, q)
    P, lines = oracle_lines(family, q)
    assert P == Q.P
    assert {frozenset(map(int, ln)) for ln in Q.lines} == lines


@pytest.mark.parametrize("family,q", [("q5minus", 2), ("q5minus", 3), ("q5minus", 4), ("w", 3),
                                      ("q4", 4), ("h3", 2), ("h4", 2)])
def test_form_collinearity_matches_lines(family, q):
    Q = geometry(family, q)
    us, vs = np.meshgrid(np.arange(Q.P), np.arange(Q.P))
    us, vs = us.ravel(), vs.ravel()
    assert (form_collinear(Q, us, vs) == Q.collinear_many(us, vs)).all()


def test_labels():
    assert geometry("q5minus", 2).label == "Q-(5,2)"
    assert geometry("w", 3).label == "W(3)"
    assert geometry("q4", 2).label == "Q(4,2)"
    assert geometry("h3", 2).label == "H(3,4)"
    assert geometry("h4", 2).label == "H(4,4)"


def test_points_are_lexicographic():
    coords = geometry("q5minus", 3).meta["coords"]
    rows = [tuple(r) for r in coords.tolist()]
    assert rows == sorted(rows)


# -- forms -------------------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13])
def test_elliptic_pair_is_irreducible(q):
    F = field_of_order(q)
    b, c = elliptic_pair(F)
    assert all(F.add(F.add(F.mul(x, x), F.mul(b, x)), c) != 0 for x in range(q))
    # lexicographically smallest
    for bb, cc in itertools.product(range(q), repeat=2):
        if (bb, cc) >= (b, c):
            break
        assert any(F.add(F.add(F.mul(x, x), F.mul(bb, x)), cc) == 0 for x in range(q))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_elliptic_form_nondegenerate(q):
    assert elliptic_form(q).is_nondegenerate()


@pytest.mark.parametrize("q", [2, 4])
def test_parabolic_char2_nondegenerate(q):
    F = field_of_order(q)
    form = FormSpec("parabolic-quadratic", 4, F, ((0, 1, 1), (2, 3, 1), (4, 4, 1)))
    assert len(form.radical()) == 1
    assert form.is_nondegenerate()


def test_degenerate_form_detected():
    F = make_field(3)
    form = FormSpec("parabolic-quadratic", 4, F, ((0, 1, 1), (2, 3, 1)))
    assert not form.is_nondegenerate()


def test_bilinear_matches_scalar_oracle():
    form = elliptic_form(3)
    rng = np.random.default_rng(0)
    X = rng.integers(0, 3, size=(30, 6))
    Y = rng.integers(0, 3, size=(40, 6))
    want = [[scalar_polar("q5minus", form.field, tuple(x), tuple(y), form.bc) for y in Y] for x in X]
    assert form.bilinear(X, Y).tolist() == want


# -- sections and duality ----------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_elliptic_section_is_maximal(q):
    Q = geometry("q5minus", q)
    O = elliptic_q3_section(Q)
    assert len(O) == q * q + 1
    assert is_partial_ovoid(Q, O)
    assert is_maximal(Q, O)


def test_section_needs_elliptic_quadric():
    with pytest.raises(errors.WrongGeometry):
        elliptic_q3_section(geometry("w", 2))


def test_h3_has_order_of_dual_elliptic():
    H = geometry("h3", 2)
    D = dualize(geometry("q5minus", 2))
    assert (H.s, H.t, H.P, H.L) == (D.s, D.t, D.P, D.L) == (4, 2, 45, 27)


# -- argument errors ---------------------------------------------------------------


def test_not_prime_power():
    with pytest.raises(errors.NotPrimePower):
        build("q5minus", 6)


@pytest.mark.parametrize("family", sorted(CAPS))
def test_caps(family):
    q = {13: 16, 16: 17, 4: 5, 3: 4}[CAPS[family]]
    with pytest.raises(errors.TooLarge):
        build(family, q)


def test_unknown_family():
    with pytest.raises(ValueError):
        build("q7", 2)
