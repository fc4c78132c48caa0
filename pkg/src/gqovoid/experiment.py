"""Monte-Carlo harness comparing the two-round construction with greedy."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import astuple, dataclass

from .errors import RunFailed
from .geometry import Quadrangle
from .ovoid import (
    FAILED,
    RunParams,
    counting_lower_bound,
    eh_lower_bound,
    greedy_random,
    is_maximal,
    mix_seed,
    two_round,
)

COLUMNS = (
    "geometry", "q", "s", "t", "algorithm", "trial", "seed", "alpha", "ps",
    "size_S", "size_T", "final_size", "maximal", "completion_path", "restarts",
    "runtime_ms", "counting_bound", "eh_bound",
)
ALGORITHMS = ("two-round", "greedy")


@dataclass(frozen=True)
class ExperimentRecord:
    geometry: str
    q: int | None
    s: int
    t: int
    algorithm: str
    trial: int
    seed: int
    alpha: float
    ps: float | None
    size_S: int | None
    size_T: int | None
    final_size: int
    maximal: bool
    completion_path: str
    restarts: int
    runtime_ms: float
    counting_bound: int
    eh_bound: int | None

    def row(self) -> list[str]:
        out = []
        for name, value in zip(COLUMNS, astuple(self)):
            if value is None:
                out.append("")
            elif isinstance(value, bool):
                out.append("true" if value else "false")
            elif name == "runtime_ms":
                out.append(f"{value:.3f}")
            elif isinstance(value, float):
                out.append(repr(value))
            else:
                out.append(str(value))
        return out


def run_trials(Q: Quadrangle, trials: int, seed: int, *, alpha=4.1, max_restarts=3,
               on_failure="greedy-complete", q=None) -> list[ExperimentRecord]:
    """Records for ``trials`` two-round runs and as many greedy runs on Q.

    Trial i of both algorithms uses seed ``mix_seed(seed, i)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    q = Q.meta.get("q", q)
    eh = eh_lower_bound(q) if Q.meta.get("family") == "q5minus" else None
    common = dict(geometry=Q.label, q=q, s=Q.s, t=Q.t, alpha=alpha,
                  counting_bound=counting_lower_bound(Q.s, Q.t), eh_bound=eh)
    records = []
    for i in range(trials):
        trial_seed = mix_seed(seed, i)
        t0 = time.perf_counter()
        try:
            r = two_round(Q, RunParams(alpha=alpha, seed=trial_seed, max_restarts=max_restarts,
                                       on_failure=on_failure))
        except RunFailed as exc:
            r = exc.result
        ms = 1e3 * (time.perf_counter() - t0)
        ok = r.completion_path != FAILED and is_maximal(Q, r.final.members)
        records.append(ExperimentRecord(
            algorithm="two-round", trial=i, seed=trial_seed, ps=r.ps_used, size_S=len(r.S),
            size_T=len(r.T), final_size=len(r.final), maximal=ok, completion_path=r.completion_path,
            restarts=r.restarts_used, runtime_ms=ms, **common))
    for i in range(trials):
        trial_seed = mix_seed(seed, i)
        t0 = time.perf_counter()
        g = greedy_random(Q, trial_seed)
        ms = 1e3 * (time.perf_counter() - t0)
        records.append(ExperimentRecord(
            algorithm="greedy", trial=i, seed=trial_seed, ps=None, size_S=None, size_T=None,
            final_size=len(g), maximal=is_maximal(Q, g.members), completion_path="greedy",
            restarts=0, runtime_ms=ms, **common))
    return records


def sort_records(records):
    order = {a: n for n, a in enumerate(ALGORITHMS)}
    return sorted(records, key=lambda r: (r.geometry, order.get(r.algorithm, 99), r.trial))


def write_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in sort_records(records):
        w.writerow(rec.row())


def summary_lines(records) -> list[str]:
    groups = {}
    for rec in sort_records(records):
        groups.setdefault((rec.geometry, rec.algorithm), []).append(rec)
    lines = []
    for (geo, alg), recs in groups.items():
        sizes = [r.final_size for r in recs]
        clean = sum(r.completion_path == "clean" for r in recs)
        text = (f"{geo:<12} {alg:<9} n={len(recs):<4d} final size mean={statistics.fmean(sizes):.2f}"
                f" min={min(sizes)} max={max(sizes)} maximal={sum(r.maximal for r in recs)}/{len(recs)}")
        if alg == "two-round":
            mean_s = statistics.fmean(r.size_S for r in recs)
            text += f" clean={clean}/{len(recs)} mean|S|={mean_s:.2f}"
        lines.append(text)
    return lines
