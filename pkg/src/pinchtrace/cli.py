"""Command line interface: ``pinchtrace <subcommand> ...``.

Exit codes: 0 success (conjecture violations are findings, not failures),
2 contract violation, 3 failed assertion (e.g. a sandwich check), 64 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from fractions import Fraction

from . import cha as chalab
from .bridges import bridge_report
from .harness import (
    SAMPLERS,
    SearchConfig,
    evaluate_pair,
    search_counterexample,
    test_clustered_upper,
    test_pinching_conjecture,
    trial_seed,
)
from .numeric import (
    ContractViolation,
    is_exact,
    matrix_from_json,
    matrix_to_json,
    random_psd,
    to_exact,
    to_float,
)
from .pinching import sandwich_check
from .report import _jsonable
from .words import clustered_trace, word_average

EXIT_OK, EXIT_CONTRACT, EXIT_ASSERT, EXIT_USAGE = 0, 2, 3, 64


class AssertionFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _emit(fh, obj):
    fh.write(json.dumps(_jsonable(obj), sort_keys=True) + "\n")


def _load(path, mode):
    with open(path) as fh:
        M = matrix_from_json(json.load(fh))
    if mode == "exact":
        return to_exact(M)
    if mode == "float":
        return to_float(M)
    return M


def _fmt(v):
    return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else f"{v:.10e}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_cha(args, out):
    if args.scan:
        for x, ratio, norm in chalab.cha_ratio_scan(args.scan.split(",")):
            row = {"x": x, "ratio": ratio, "normalized": norm}
            _emit(out, row) if args.json else print(
                f"x={x:.3e}  ratio={ratio:.10g}  ratio*x*4032/5={norm:.10g}", file=out)
        return EXIT_OK
    inst = chalab.cha_pair(args.x, exact=args.mode == "exact")
    rep = evaluate_pair(inst.A, inst.B, 5, 5)
    closed = chalab.cha_exact_values(inst.x)
    order = chalab.cha_ordering_check(inst.x, exact=inst.exact)
    row = {"x": inst.x, "mode": args.mode, "pinched": rep.pinched_average,
           "clustered": rep.clustered, "average": rep.average,
           "closed_form": {"pinched": closed[0], "clustered": closed[1], "average": closed[2]},
           "ordering": order.checks}
    if args.json:
        _emit(out, row)
    else:
        for k in ("pinched", "clustered", "average"):
            print(f"{k:10s} {_fmt(row[k])}", file=out)
        print(f"ordering   {order.checks}", file=out)
    return EXIT_OK


def cmd_sandwich(args, out):
    failed = 0
    for t in range(args.trials):
        s = trial_seed(args.seed, t)
        A = random_psd(args.dim, "isotropic", s)
        B = random_psd(args.dim, "isotropic", s + 1)
        rep = sandwich_check(A, B, args.n, args.tol)
        rep.trial, rep.seed = t, s
        failed += not all(rep.checks.values())
        row = rep.to_dict()
        row["lower_margin"] = float(rep.gap)
        row["upper_margin"] = -float(rep.clustered_margin)
        if args.json or args.out:
            _emit(out, row)
        else:
            print(f"trial {t}: pinched={rep.pinched_average:.6e} average={rep.average:.6e} "
                  f"clustered={rep.clustered:.6e} ok={all(rep.checks.values())}", file=out)
    if failed:
        raise AssertionFailed(f"sandwich failed on {failed} of {args.trials} trials")
    return EXIT_OK


def cmd_poly(args, out):
    A, B = _load(args.matrix_a, args.mode), _load(args.matrix_b, args.mode)
    avg = word_average(A, B, args.n, args.m, args.method)
    row = {"n": args.n, "m": args.m, "average": avg,
           "clustered": clustered_trace(A, B, args.n, args.m), "method": args.method}
    if args.json:
        _emit(out, row)
    else:
        print(f"average   {_fmt(avg)}\nclustered {_fmt(row['clustered'])}", file=out)
    return EXIT_OK


def cmd_bridges(args, out):
    A, B = _load(args.matrix_a, None), _load(args.matrix_b, None)
    if is_exact(A) != is_exact(B):
        A, B = to_float(A), to_float(B)
    rep = bridge_report(A, B, args.n, args.m, top_k=args.top, rank_by=args.rank_by)
    if args.json:
        _emit(out, rep.to_dict())
    else:
        print(f"average={rep.average} clustered={rep.clustered} "
              f"aggregate_gain={rep.aggregate_gain:.6g}", file=out)
        for c in rep.cycles:
            d = c.to_dict()
            print(f"  {d['cycle']:30s} gain={c.gain:.4g} averaged={d['averaged']} "
                  f"clustered={d['clustered']} positive_bridge={c.positive_bridge}", file=out)
    return EXIT_OK


def _conjecture_test(fn, args, out):
    summary = fn(args.trials, args.dim, args.n, args.m, args.sampler, args.seed, args.tol,
                 anchor=args.anchor, sink=lambda r: _emit(out, r.to_dict()))
    _emit(out, summary.to_dict())
    return EXIT_OK


def cmd_pinch_test(args, out):
    return _conjecture_test(test_pinching_conjecture, args, out)


def cmd_upper_test(args, out):
    return _conjecture_test(test_clustered_upper, args, out)


def cmd_search(args, out):
    cfg = SearchConfig(seed=args.seed, dim=args.dim, n=args.n, m=args.m, decades=args.decades,
                       epsilon=args.epsilon, iterations=args.iterations, restarts=args.restarts,
                       step=args.step, decay=args.decay, objective=args.objective)
    initial = None
    if args.init_cha:
        inst = chalab.cha_pair(args.init_cha, exact=False)
        initial = (inst.A, inst.B)
    res = search_counterexample(cfg, initial)
    row = res.report.to_dict()
    row.update(objective=args.objective, best_objective=res.best_objective,
               evaluations=res.evaluations, max_ratio_seen=res.max_ratio_seen,
               matrix_a=matrix_to_json(res.A), matrix_b=matrix_to_json(res.B),
               bridges=res.bridges.to_dict() if res.bridges else None)
    _emit(out, row)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pinchtrace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write JSON lines to this file instead of stdout")
        sp.add_argument("--json", action="store_true", help="emit JSON")
        return sp

    sp = common(sub.add_parser("cha", help="the 3x3 counterexample family"))
    sp.add_argument("--x", default="1/1000", help="rational or decimal parameter")
    sp.add_argument("--mode", choices=("exact", "float"), default="exact")
    sp.add_argument("--scan", help="comma-separated x values for the ratio scan")
    sp.set_defaults(fn=cmd_cha)

    sp = common(sub.add_parser("sandwich", help="check the two-B sandwich on random pairs"))
    sp.add_argument("--dim", type=int, default=4)
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(fn=cmd_sandwich)

    sp = common(sub.add_parser("poly", help="word average of two matrices from JSON files"))
    sp.add_argument("--matrix-a", required=True)
    sp.add_argument("--matrix-b", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--mode", choices=("exact", "float"), default="float")
    sp.add_argument("--method", choices=("enum", "poly", "comp"), default="poly")
    sp.set_defaults(fn=cmd_poly)

    sp = common(sub.add_parser("bridges", help="cycle-contribution report"))
    sp.add_argument("--matrix-a", required=True)
    sp.add_argument("--matrix-b", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--top", type=int, default=10)
    sp.add_argument("--rank-by", choices=("gain", "weight"), default="gain")
    sp.set_defaults(fn=cmd_bridges)

    for name, fn, text in (("pinch-test", cmd_pinch_test, "stress-test the pinching lower bound"),
                           ("upper-test", cmd_upper_test, "stress-test the clustered upper bound")):
        sp = common(sub.add_parser(name, help=text))
        sp.add_argument("--dim", type=int, default=3)
        sp.add_argument("--n", type=int, default=3)
        sp.add_argument("--m", type=int, default=3)
        sp.add_argument("--trials", type=int, default=1000)
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--sampler", choices=sorted(SAMPLERS), default="isotropic")
        sp.add_argument("--anchor", action="store_true", help="also report the log-exp anchor")
        sp.set_defaults(fn=fn)

    sp = common(sub.add_parser("search", help="hill-climb for clustered-bound violations"))
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--m", type=int, default=5)
    sp.add_argument("--decades", type=float, default=6.0)
    sp.add_argument("--epsilon", type=float, default=1e-3)
    sp.add_argument("--iterations", type=int, default=2000)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--step", type=float, default=0.5)
    sp.add_argument("--decay", type=float, default=0.998)
    sp.add_argument("--objective", choices=("ratio", "gap"), default="ratio")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--init-cha", metavar="X", help="start restart 0 at the family member x")
    sp.set_defaults(fn=cmd_search)
    return p


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        with _sink(args.out) as out:
            return args.fn(args, out)
    except AssertionFailed as exc:
        print(f"pinchtrace: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except (ContractViolation, ZeroDivisionError) as exc:
        print(f"pinchtrace: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"pinchtrace: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def main():
    sys.exit(run_cli())
