"""Partial ovoids: verifiers, the two-round randomized construction, greedy
baseline/completion, size bounds and the first-round diagnostics.

Randomness
----------
Every random draw goes through a ``random.Random`` (CPython's MT19937)
seeded with a 64-bit integer; only ``random()`` and ``randrange()`` are
used, both stable across CPython releases.  Derived seeds (restarts,
experiment trials) come from :func:`mix_seed`.

Logarithms are natural unless ``base`` is passed to :func:`compute_p`.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidProbability,
    NotPartialOvoid,
    NoUncoveredNeighbor,
    RunFailed,
    UndefinedLog,
)
from .geometry import Quadrangle, popcount

MASK64 = (1 << 64) - 1
LOG_BASE = math.e

UNVERIFIED = "unverified"
PARTIAL = "verified-partial"
MAXIMAL = "verified-maximal"

CLEAN = "clean"
FALLBACK = "fallback-greedy"
FAILED = "failed"


def mix_seed(seed: int, index: int) -> int:
    """SplitMix64 finalizer applied to ``seed + (index + 1) * golden``.

    This is the fixed mixing function behind restart chains and per-trial
    seeds; changing it changes every derived run.
    """
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# -- bounds ----------------------------------------------------------------------


def counting_lower_bound(s: int, t: int) -> int:
    """ceil((1 + s + st + s^2 t) / (1 + s + st))."""
    if s < 1 or t < 1:
        raise ValueError("s and t must be >= 1")
    num = 1 + s + s * t + s * s * t
    den = 1 + s + s * t
    return -(-num // den)


def eh_lower_bound(q: int) -> int:
    """Ebert-Hirschfeld bound for maximal partial ovoids of Q-(5,q)."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return 2 * q + 2 if q >= 5 else 2 * q + 1


@dataclass(frozen=True)
class PValues:
    p: float
    ps: float
    ps_raw: float
    clamped: bool


def compute_p(s: int, t: int, alpha: float, base: float = LOG_BASE) -> PValues:
    """Per-line heads probability ps = (s log t - alpha s log log s) / t, clamped to [0, 1]."""
    if s <= 1:
        raise UndefinedLog(f"log log s is undefined for s = {s}")
    if t < 1:
        raise UndefinedLog(f"log t is undefined for t = {t}")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")

    def log(x):
        return math.log(x) / math.log(base)

    ps_raw = (s * log(t) - alpha * s * log(log(s))) / t
    ps = min(1.0, max(0.0, ps_raw))
    return PValues(ps / s, ps, ps_raw, ps != ps_raw)


# -- partial ovoids ----------------------------------------------------------------


@dataclass(frozen=True)
class PartialOvoid:
    members: tuple
    status: str = UNVERIFIED
    geometry: Quadrangle | None = field(default=None, compare=False, repr=False)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _as_list(Q, O):
    pts = [int(u) for u in O]
    for u in pts:
        Q._check(u)
    return pts


def is_partial_ovoid(Q: Quadrangle, O) -> bool:
    pts = _as_list(Q, O)
    if len(set(pts)) != len(pts):
        return False
    if len(pts) < 2:
        return True
    a = np.array(pts, dtype=np.int64)
    hits = Q.collinear_many(np.repeat(a, len(a)), np.tile(a, len(a))).reshape(len(a), len(a))
    return int(hits.sum()) == len(a)


def is_maximal(Q: Quadrangle, O) -> bool:
    pts = _as_list(Q, O)
    return is_partial_ovoid(Q, pts) and popcount(Q.cover_mask(pts)) == Q.P


def verify(Q: Quadrangle, O) -> PartialOvoid:
    members = tuple(int(u) for u in O)
    if is_maximal(Q, members):
        status = MAXIMAL
    elif is_partial_ovoid(Q, members):
        status = PARTIAL
    else:
        status = UNVERIFIED
    return PartialOvoid(members, status, Q)


def greedy_complete(Q: Quadrangle, O, seed) -> PartialOvoid:
    """Extend a partial ovoid by uniformly random uncovered points until maximal."""
    rng = _rng(seed)
    members = _as_list(Q, O)
    if not is_partial_ovoid(Q, members):
        raise NotPartialOvoid("input has two collinear points")
    covered = Q.cover_mask(members)
    while True:
        free = np.flatnonzero(~Q.bools_of(covered))
        if not len(free):
            break
        v = int(free[rng.randrange(len(free))])
        members.append(v)
        covered = covered | Q.row(v)
    return verify(Q, members)


def greedy_random(Q: Quadrangle, seed) -> PartialOvoid:
    return greedy_complete(Q, (), seed)


# -- the two-round algorithm ---------------------------------------------------------


@dataclass(frozen=True)
class RunParams:
    alpha: float = 4.1
    seed: int = 0
    x: int | str = "random"
    p_override: float | None = None
    max_restarts: int = 3
    on_failure: str = "greedy-complete"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.p_override is not None and not 0.0 <= self.p_override <= 1.0:
            raise InvalidProbability(f"p_override={self.p_override} outside [0, 1]")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.on_failure not in ("fail", "greedy-complete"):
            raise ValueError(f"on_failure must be 'fail' or 'greedy-complete', not {self.on_failure!r}")
        if self.x != "random" and not isinstance(self.x, int):
            raise ValueError("x must be a point index or 'random'")


@dataclass(frozen=True)
class FirstRound:
    S: tuple
    U: frozenset
    U_mask: np.ndarray = field(compare=False, repr=False)


@dataclass(frozen=True)
class SecondRound:
    x_star: int
    x_plus: int
    T: tuple


@dataclass(frozen=True)
class RunResult:
    x: int
    S: tuple
    T: tuple
    x_star: int | None
    x_plus: int | None
    U_size_after_round1: int
    final: PartialOvoid
    p_used: float
    ps_used: float
    ps_clamped: bool
    alpha: float
    seed: int
    attempt_seed: int
    restarts_used: int
    completion_path: str
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def maximal(self) -> bool:
        return self.final.status == MAXIMAL


def first_round(Q: Quadrangle, x: int, ps: float, rng) -> FirstRound:
    """Coin per line through x; on heads a uniform point of the line minus x joins S."""
    if not 0.0 <= ps <= 1.0:
        raise InvalidProbability(f"ps={ps} outside [0, 1]")
    rng = _rng(rng)
    x = Q._check(x)
    S = []
    for ell in sorted(Q.lines_through(x).tolist()):
        if rng.random() < ps:
            others = [int(v) for v in Q.lines[ell] if v != x]
            S.append(others[rng.randrange(len(others))])
    U_mask = ~Q.cover_mask(S + [x]) & Q.full_mask()
    return FirstRound(tuple(S), frozenset(Q.indices_of(U_mask).tolist()), U_mask)


def second_round(Q: Quadrangle, x: int, S, U, rng) -> SecondRound:
    """Pick an uncovered neighbour x* of x and one U-point per line through x*.

    Raises NoUncoveredNeighbor when every point of x^perp_o is covered by S.
    """
    rng = _rng(rng)
    x = Q._check(x)
    S = list(S)
    U_bools = Q.bools_of(U) if isinstance(U, np.ndarray) else _bools(Q, U)
    cand_mask = Q.row(x) & ~Q.cover_mask(S) & ~Q.mask_of([x])
    cands = Q.indices_of(cand_mask)
    if not len(cands):
        raise NoUncoveredNeighbor(f"x^perp_o is covered by S (x={x}, |S|={len(S)})")
    x_star = int(cands[rng.randrange(len(cands))])
    T = []
    for ell in sorted(Q.lines_through(x_star).tolist()):
        pts = [int(v) for v in Q.lines[ell] if U_bools[v]]
        if pts:
            T.append(pts[rng.randrange(len(pts))])
    joining = Q.lines[Q.line_through(x, x_star)]
    x_plus = min(int(v) for v in joining if v != x and v != x_star)
    T.append(x_plus)
    return SecondRound(x_star, x_plus, tuple(T))


def _bools(Q, points):
    b = np.zeros(Q.P, dtype=bool)
    b[list(points)] = True
    return b


def _attempt(Q, params, attempt_seed, timings):
    rng = random.Random(attempt_seed)
    x = rng.randrange(Q.P) if params.x == "random" else Q._check(params.x)
    if params.p_override is not None:
        p, ps, clamped = params.p_override, min(1.0, params.p_override * Q.s), params.p_override * Q.s > 1
    else:
        pv = compute_p(Q.s, Q.t, params.alpha)
        p, ps, clamped = pv.p, pv.ps, pv.clamped
    t0 = time.perf_counter()
    r1 = first_round(Q, x, ps, rng)
    t1 = time.perf_counter()
    timings["round1_ms"] = timings.get("round1_ms", 0.0) + 1e3 * (t1 - t0)
    try:
        r2 = second_round(Q, x, r1.S, r1.U_mask, rng)
    except NoUncoveredNeighbor:
        r2 = None
    t2 = time.perf_counter()
    timings["round2_ms"] = timings.get("round2_ms", 0.0) + 1e3 * (t2 - t1)
    members = list(r1.S) + (list(r2.T) if r2 else [])
    final = verify(Q, members)
    timings["verify_ms"] = timings.get("verify_ms", 0.0) + 1e3 * (time.perf_counter() - t2)
    return rng, x, p, ps, clamped, r1, r2, final


def two_round(Q: Quadrangle, params: RunParams = RunParams()) -> RunResult:
    """Run the two-round construction with restarts and the configured failure policy.

    Attempt i uses seed ``params.seed`` for i = 0 and ``mix_seed(params.seed, i)``
    afterwards.  ``completion_path`` is ``clean`` only when S and T alone form
    a maximal partial ovoid.
    """
    timings = {}
    start = time.perf_counter()
    for i in range(params.max_restarts + 1):
        attempt_seed = params.seed if i == 0 else mix_seed(params.seed, i)
        rng, x, p, ps, clamped, r1, r2, final = _attempt(Q, params, attempt_seed, timings)
        if r2 is not None and final.status == MAXIMAL:
            path = CLEAN
            break
    else:
        if params.on_failure == "greedy-complete":
            t0 = time.perf_counter()
            final = greedy_complete(Q, final.members, rng)
            timings["complete_ms"] = 1e3 * (time.perf_counter() - t0)
            path = FALLBACK
        else:
            path = FAILED
    timings["total_ms"] = 1e3 * (time.perf_counter() - start)
    result = RunResult(
        x=x,
        S=r1.S,
        T=r2.T if r2 else (),
        x_star=r2.x_star if r2 else None,
        x_plus=r2.x_plus if r2 else None,
        U_size_after_round1=len(r1.U),
        final=final,
        p_used=p,
        ps_used=ps,
        ps_clamped=clamped,
        alpha=params.alpha,
        seed=params.seed,
        attempt_seed=attempt_seed,
        restarts_used=i,
        completion_path=path,
        timings=timings,
    )
    if path == FAILED:
        raise RunFailed(f"no maximal partial ovoid after {i + 1} attempts", result)
    return result


# -- first-round diagnostics ----------------------------------------------------------


@dataclass(frozen=True)
class Diagnostics:
    """Measured first-round statistics next to their asymptotic reference values."""

    prop1_max_line_U: int
    prop1_reference: int
    prop2_max_perp_U: int
    prop2_reference: float
    prop3_min_pair_U: int | None
    prop3_reference: float
    prop3_pairs: int

    def lines(self) -> list[str]:
        p3 = "n/a" if self.prop3_min_pair_U is None else str(self.prop3_min_pair_U)
        return [
            f"Property I   max |l & U| over lines missing x      = {self.prop1_max_line_U:<6d}"
            f" reference ceil(ln s)      = {self.prop1_reference}",
            f"Property II  max |u^perp & U| over u in x^perp\\S  = {self.prop2_max_perp_U:<6d}"
            f" reference s (ln s)^alpha  = {self.prop2_reference:.3f}",
            f"Property III min |{{v,w}}^perp_o & U| ({self.prop3_pairs} pairs) = {p3:<6s}"
            f" reference (ln s)^alpha    = {self.prop3_reference:.3f}",
        ]


def diagnostics_properties(Q: Quadrangle, x: int, S, U, *, alpha: float = 4.1,
                           n_pairs: int = 1000, seed: int = 0) -> Diagnostics:
    """Measure the quantities of Properties I-III for one first-round outcome.

    Nothing is asserted: at desk scale the asymptotic statements do not apply.
    ``n_pairs`` non-collinear pairs v, w outside S + {x} are sampled exactly.
    """
    x = Q._check(x)
    S = [int(u) for u in S]
    U_mask = U if isinstance(U, np.ndarray) else Q.mask_of(U)
    Ub = Q.bools_of(U_mask)

    off_x = ~(Q.lines == x).any(axis=1)
    per_line = Ub[Q.lines].sum(axis=1)
    prop1 = int(per_line[off_x].max()) if off_x.any() else 0

    xs = np.setdiff1d(Q.indices_of(Q.row(x)), np.array(S, dtype=np.int64))
    prop2 = int(popcount(Q.rows(xs) & U_mask).max()) if len(xs) else 0

    rng = random.Random(seed)
    banned = set(S) | {x}
    vs, ws = [], []
    attempts = 0
    while len(vs) < n_pairs and attempts < 1000 * max(n_pairs, 1):
        attempts += 1
        v, w = rng.randrange(Q.P), rng.randrange(Q.P)
        if v in banned or w in banned or Q.collinear(v, w):
            continue
        vs.append(v)
        ws.append(w)
    prop3 = None
    if vs:
        sizes = popcount(Q.rows(vs) & Q.rows(ws) & U_mask)
        prop3 = int(sizes.min())

    ln_s = math.log(Q.s)
    return Diagnostics(prop1, math.ceil(ln_s), prop2, Q.s * ln_s**alpha, prop3, ln_s**alpha, len(vs))


# -- spreads via duality ------------------------------------------------------------


def is_partial_spread(Q: Quadrangle, lines) -> bool:
    """Pairwise disjoint lines of Q."""
    lines = [int(ell) for ell in lines]
    if len(set(lines)) != len(lines):
        return False
    pts = Q.lines[lines].ravel()
    return len(np.unique(pts)) == len(pts)


def is_maximal_spread(Q: Quadrangle, lines) -> bool:
    """Partial spread such that every line of Q meets one of its lines."""
    if not is_partial_spread(Q, lines):
        return False
    covered = np.zeros(Q.P, dtype=bool)
    covered[Q.lines[[int(ell) for ell in lines]].ravel()] = True
    return bool(covered[Q.lines].any(axis=1).all())
