"""GQI v1, the plain-text interchange format for quadrangles.

    GQI 1 <s> <t> <P> <L>
    <s+1 point indices>      (L lines)

The writer sorts each line and then the lines lexicographically, so two
structures with the same line set serialize identically.
"""

from __future__ import annotations

import io
import os

from .errors import GQIFormatError
from .geometry import Quadrangle, line_count, point_count


def dumps(Q: Quadrangle) -> str:
    rows = sorted(tuple(sorted(int(p) for p in ln)) for ln in Q.lines)
    out = io.StringIO()
    out.write(f"GQI 1 {Q.s} {Q.t} {Q.P} {len(rows)}\n")
    for r in rows:
        out.write(" ".join(map(str, r)) + "\n")
    return out.getvalue()


def write(Q: Quadrangle, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps(Q))


def loads(text: str, label: str = "", *, backend="auto") -> Quadrangle:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise GQIFormatError("empty input")
    head = rows[0]
    if len(head) != 6 or head[0] != "GQI" or head[1] != "1":
        raise GQIFormatError(f"bad header {' '.join(head)!r}; expected 'GQI 1 s t P L'")
    try:
        s, t, P, L = (int(x) for x in head[2:])
    except ValueError:
        raise GQIFormatError("non-integer header field") from None
    if s < 1 or t < 1:
        raise GQIFormatError("s and t must be positive")
    if P != point_count(s, t) or L != line_count(s, t):
        raise GQIFormatError(f"header counts P={P}, L={L} inconsistent with (s,t)=({s},{t})")
    body = rows[1:]
    if len(body) != L:
        raise GQIFormatError(f"expected {L} lines, found {len(body)}")
    lines = []
    for n, r in enumerate(body, start=2):
        if len(r) != s + 1:
            raise GQIFormatError(f"line {n}: expected {s + 1} indices, found {len(r)}")
        try:
            pts = [int(x) for x in r]
        except ValueError:
            raise GQIFormatError(f"line {n}: non-integer point index") from None
        if min(pts) < 0 or max(pts) >= P:
            raise GQIFormatError(f"line {n}: point index outside 0..{P - 1}")
        if len(set(pts)) != len(pts):
            raise GQIFormatError(f"line {n}: repeated point")
        lines.append(pts)
    return Quadrangle(s, t, lines, label, backend=backend)


def read(path, *, backend="auto") -> Quadrangle:
    with open(path, encoding="ascii") as fh:
        text = fh.read()
    label = os.path.splitext(os.path.basename(str(path)))[0]
    return loads(text, label, backend=backend)
