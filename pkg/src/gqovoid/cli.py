"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 verification failure, 4 algorithm failure.
The default seed may be set with the GQOVOID_SEED environment variable;
``--seed`` takes precedence.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import classical, gqi
from .errors import AxiomFailure, GQError, RunFailed
from .experiment import run_trials, summary_lines, write_csv
from .geometry import check_perp_identities, dualize, locally_sparse, verify_axioms
from .ovoid import (
    RunParams,
    counting_lower_bound,
    diagnostics_properties,
    eh_lower_bound,
    is_maximal,
    is_maximal_spread,
    is_partial_ovoid,
    two_round,
)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_ALGORITHM = 0, 2, 3, 4
SEED_ENV = "GQOVOID_SEED"


class InputError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _load(target: list[str]):
    """A geometry from either ``PATH`` or ``FAMILY Q``."""
    if len(target) == 1:
        return gqi.read(target[0])
    if len(target) == 2:
        family, q = target
        try:
            q = int(q)
        except ValueError:
            raise InputError(f"q must be an integer, got {q!r}") from None
        return classical.build(family, q)
    raise InputError("expected PATH or FAMILY Q")


def _header(Q) -> str:
    return f"geometry: {Q.label} (s={Q.s}, t={Q.t}, P={Q.P}, L={Q.L})"


def cmd_build(args) -> int:
    Q = _load([args.family, args.q])
    report = verify_axioms(Q, seed=args.seed)
    text = gqi.dumps(Q)
    info = sys.stdout if args.out else sys.stderr
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_header(Q), file=info)
    for line in report.lines():
        print("  " + line, file=info)
    print("axioms: " + ("PASS" if report.ok else "FAIL"), file=info)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    Q = gqi.read(args.path)
    print(_header(Q))
    report = verify_axioms(Q, seed=args.seed)
    for line in report.lines():
        print("  " + line)
    ids = check_perp_identities(Q, seed=args.seed)
    eq1 = "PASS" if not ids.eq1_failures else f"FAIL first={ids.eq1_failures[0]}"
    eq2 = "PASS" if not ids.eq2_failures else f"FAIL first={ids.eq2_failures[0]}"
    print(f"  |u^perp_o| = s(t+1) = {Q.s * (Q.t + 1):<5d} {eq1} ({ids.eq1_checked} points)")
    print(f"  |{{u,v}}^perp_o| = t+1 = {Q.t + 1:<5d} {eq2} ({ids.eq2_mode}, {ids.eq2_checked} pairs)")
    mode = args.sparse_mode
    if mode == "auto":
        mode = "exhaustive" if Q.P <= 400 else "sampled"
    sparse = locally_sparse(Q, mode, n_triples=args.triples, seed=args.seed)
    print("  " + sparse.describe())
    failed = not report.ok or not ids.ok or (args.require_sparse and not sparse.verdict)
    print("verification: " + ("FAIL" if failed else "PASS"))
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_run(args) -> int:
    Q = _load(args.target)
    primal = None
    if args.dual:
        primal, Q = Q, dualize(Q)
    x = "random" if args.x in (None, "random") else int(args.x)
    params = RunParams(alpha=args.alpha, seed=args.seed, x=x, p_override=args.p,
                       max_restarts=args.max_restarts, on_failure=args.on_failure)
    failed = None
    try:
        r = two_round(Q, params)
    except RunFailed as exc:
        failed, r = exc, exc.result

    members = sorted(r.final.members)
    print(_header(Q))
    print(f"seed: {params.seed}  attempt seed: {r.attempt_seed}  alpha: {params.alpha}  log: natural")
    print(f"p = {r.p_used:.6g}  ps = {r.ps_used:.6g}  clamped: {'yes' if r.ps_clamped else 'no'}"
          + ("  (override)" if args.p is not None else ""))
    print(f"x = {r.x}  x* = {r.x_star}  x+ = {r.x_plus}")
    print(f"|S| = {len(r.S)}  |U| after round 1 = {r.U_size_after_round1}  |T| = {len(r.T)}")
    print(f"restarts used: {r.restarts_used}  completion path: {r.completion_path}")
    print(f"final size: {len(members)}  partial ovoid: {_yn(is_partial_ovoid(Q, members))}"
          f"  maximal: {_yn(is_maximal(Q, members))}")
    bounds = f"counting bound: {counting_lower_bound(Q.s, Q.t)}"
    if Q.meta.get("family") == "q5minus":
        bounds += f"  Ebert-Hirschfeld bound: {eh_lower_bound(Q.meta['q'])}"
    print(bounds)
    print("members: " + " ".join(map(str, members)))
    if primal is not None:
        kind = "maximal partial spread" if is_maximal_spread(primal, members) else "partial spread (not maximal)"
        print(f"as lines of {primal.label}: {kind} of size {len(members)}")
        for ell in members:
            print(f"  line {ell}: " + " ".join(map(str, primal.lines[ell])))
    if args.diagnostics:
        U = set(range(Q.P)) - Q.cover(list(r.S) + [r.x])
        diag = diagnostics_properties(Q, r.x, r.S, U, alpha=params.alpha, n_pairs=args.pairs,
                                      seed=params.seed)
        print("diagnostics (measured, not asserted):")
        for line in diag.lines():
            print("  " + line)
    if args.timings:
        print("timings: " + "  ".join(f"{k}={v:.3f}" for k, v in sorted(r.timings.items())))
    if failed is not None:
        print(f"run failed: {failed}")
        return EXIT_ALGORITHM
    return EXIT_OK


def _yn(flag) -> str:
    return "yes" if flag else "no"


def _experiment_geometries(specs):
    for spec in specs:
        if ":" in spec:
            family, q = spec.split(":", 1)
            yield _load([family, q])
        else:
            yield gqi.read(spec)


def cmd_experiment(args) -> int:
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    records = []
    for Q in _experiment_geometries(args.geometries):
        records += run_trials(Q, args.trials, args.seed, alpha=args.alpha,
                              max_restarts=args.max_restarts, on_failure=args.on_failure)
    if args.out:
        directory = os.path.dirname(os.path.abspath(args.out))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".partial")
        try:
            with os.fdopen(fd, "w", encoding="ascii", newline="") as fh:
                write_csv(records, fh)
            os.replace(tmp, args.out)
        except BaseException:
            os.unlink(tmp)
            raise
        info = sys.stdout
    else:
        write_csv(records, sys.stdout)
        info = sys.stderr
    print(f"master seed: {args.seed}  trials: {args.trials}  alpha: {args.alpha}", file=info)
    for line in summary_lines(records):
        print(line, file=info)
    return EXIT_OK


def cmd_dualize(args) -> int:
    Q = gqi.read(args.path)
    try:
        D = dualize(Q)
    except AxiomFailure as exc:
        print(f"axiom failure: {exc}")
        for line in exc.report.lines():
            print("  " + line)
        return EXIT_VERIFY
    gqi.write(D, args.out)
    print(f"dual of {Q.label}: order ({D.s},{D.t}), P={D.P}, L={D.L} -> {args.out}")
    print("note: partial ovoids of the dual are partial spreads of the original quadrangle")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqovoid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a classical quadrangle and write GQI v1")
    p.add_argument("family", choices=classical.FAMILIES)
    p.add_argument("q")
    p.add_argument("--out", "-o", help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check axioms, perp identities and local sparsity of a GQI file")
    p.add_argument("path")
    p.add_argument("--sparse-mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--triples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--require-sparse", action="store_true",
                   help="treat a non-locally-sparse verdict as a verification failure")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="one two-round trial on PATH or FAMILY Q")
    p.add_argument("target", nargs="+")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha", type=float, default=4.1)
    p.add_argument("--x", default=None, help="fixed point index (default: random)")
    p.add_argument("--p", type=float, default=None, help="override the per-point probability p")
    p.add_argument("--on-failure", choices=("greedy-complete", "fail"), default="greedy-complete")
    p.add_argument("--max-restarts", type=int, default=3)
    p.add_argument("--diagnostics", action="store_true")
    p.add_argument("--pairs", type=int, default=1000, help="pair samples for the Property III statistic")
    p.add_argument("--dual", action="store_true", help="run on the dual and report a partial spread")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="Monte-Carlo trials, CSV output")
    p.add_argument("geometries", nargs="+", metavar="FAMILY:Q|PATH")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha", type=float, default=4.1)
    p.add_argument("--max-restarts", type=int, default=3)
    p.add_argument("--on-failure", choices=("greedy-complete", "fail"), default="greedy-complete")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("dualize", help="write the point-line dual of a GQI file")
    p.add_argument("path")
    p.add_argument("out")
    p.set_defaults(func=cmd_dualize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args)
    except (InputError, GQError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
