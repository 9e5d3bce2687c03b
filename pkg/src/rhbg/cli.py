"""Command line entry point: ``rhbg <command> ...``.

Exit status 1 means bad input. Status 2 is kept for internal invariant
failures, cross-method disagreement included.
"""
from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass

from . import analysis
from .avgprop import check_average_property
from .core import (GameError, Method, format_decimal, format_rational, parse_candidate, parse_game, parse_rational,
                   simplest_within)
from .milp import build_milp, export_lp
from .simulator import (DEFAULT_MAX_STEPS, Configuration, Interactive, Scripted, parse_script, run_play,
                        strategy_avg_p1, strategy_avg_p2, strategy_guard_p1)
from .solver import DEFAULT_MAX_ITERS, DEFAULT_TOL, ENUMERATION_LIMIT, InvariantError, regime_count, solve
from .strength import classify

EXIT_OK, EXIT_DOMAIN, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandResult:
    code: int
    stdout: str = ""
    stderr: str = ""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; we reserve 2 for bugs
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise GameError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str):
    return parse_game(_read(path))


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise GameError(f"cannot write {path}: {exc.strerror}") from None


def _exact_threshold(game):
    if game.is_acyclic():
        return solve(game, Method.DAG)
    if regime_count(game) <= ENUMERATION_LIMIT:
        return solve(game, Method.ENUMERATE)
    raise GameError("game too large for an exact solve")


# -- commands ---------------------------------------------------------------

def cmd_solve(a, out, inp):
    game = _load(a.game)
    tol = parse_rational(a.tol)
    th = solve(game, a.method, tol=tol, max_iters=a.max_iters)
    for v in game.vertices:
        q = th[v]
        shown = q if th.exact else simplest_within(q, tol)
        out.write(f"{v} {format_rational(shown)} {format_decimal(q)}\n")
    out.write(f"# method {th.method.value}")
    if th.method is Method.ITERATE:
        out.write(f" iterations {th.iterations} residual {format_decimal(th.residual, 6)}")
    out.write("\n")
    if a.cross_check:
        _cross_check(game, th, tol, a.max_iters, out)
    return EXIT_OK


def _cross_check(game, th, tol, max_iters, out):
    runs = {th.method: th}
    for m in (Method.ENUMERATE, Method.MILP, Method.ITERATE, Method.DAG):
        if m in runs or (m is Method.DAG and not game.is_acyclic()):
            continue
        try:
            runs[m] = solve(game, m, tol=tol, max_iters=max_iters)
        except GameError as exc:
            out.write(f"# cross-check: {m.value} skipped ({exc})\n")
    exact = [r for r in runs.values() if r.exact]
    approx = [r for r in runs.values() if not r.exact]
    for r in exact[1:]:
        if r.values != exact[0].values:
            raise InvariantError(f"{r.method.value} disagrees with {exact[0].method.value}")
    if exact:
        for r in approx:
            gap = max(abs(r[v] - exact[0][v]) for v in game.vertices)
            if gap > tol:
                raise InvariantError(f"{r.method.value} off by {format_decimal(gap, 6)} from {exact[0].method.value}")
    out.write(f"# cross-check ok: {' '.join(m.value for m in runs)}\n")


def cmd_classify(a, out, inp):
    game = _load(a.game)
    th = _exact_threshold(game)
    strengths = classify(game, th)
    for v in game.vertices:
        out.write(f"{v} {format_rational(th[v])} {strengths[v]}\n")
    return EXIT_OK


def _p1_strategy(choice, game, f):
    if choice == "avg":
        return strategy_avg_p1(f, game)
    if choice == "guard":
        return strategy_guard_p1(f, game)
    if choice.startswith("script:"):
        return Scripted(parse_script(_read(choice[7:])))
    raise GameError(f"unknown Player 1 strategy {choice!r}")


def _p2_strategy(choice, game, f):
    if choice == "avg":
        return strategy_avg_p2(f, game)
    if choice.startswith("eps:"):
        return strategy_avg_p2(f, game, parse_rational(choice[4:]))
    if choice.startswith("script:"):
        return Scripted(parse_script(_read(choice[7:])))
    raise GameError(f"unknown Player 2 strategy {choice!r}")


def _needs_threshold(*specs):
    return any(not s.startswith("script:") for s in specs)


def cmd_simulate(a, out, inp):
    game = _load(a.game)
    start = Configuration(a.vertex, parse_rational(a.budget))
    f = _exact_threshold(game) if _needs_threshold(a.p1, a.p2) else None
    trace = run_play(game, start, _p1_strategy(a.p1, game, f), _p2_strategy(a.p2, game, f), a.max_steps)
    out.write(trace.to_text(a.digits) + "\n")
    if a.json:
        _write(a.json, trace.to_json() + "\n")
    return EXIT_OK


def cmd_play(a, out, inp):
    game = _load(a.game)
    start = Configuration(a.vertex, parse_rational(a.budget))
    f = _exact_threshold(game)

    def read(prompt):
        out.write(prompt)
        out.flush()
        line = inp.readline()
        if not line:
            raise EOFError
        return line

    def write(msg):
        out.write(msg + "\n")

    human = Interactive(read, write)
    if a.as_ == "p1":
        s1, s2 = human, _p2_strategy(a.opponent, game, f)
    else:
        s1, s2 = _p1_strategy(a.opponent, game, f), human
    trace = run_play(game, start, s1, s2, a.max_steps)
    out.write(trace.to_text() + "\n")
    return EXIT_OK


def cmd_sweep(a, out, inp):
    game = _load(a.game)
    if a.grid:
        grid = [parse_rational(x) for x in a.grid.split(",") if x.strip()]
    else:
        grid = analysis.lambda_grid(a.steps, a.lo, a.hi)
    rows = analysis.sweep(game, a.vertex, grid, a.method, tol=parse_rational(a.tol), max_iters=a.max_iters)
    text = analysis.sweep_csv(rows)
    if a.out:
        _write(a.out, text)
        out.write(f"wrote {len(rows)} rows to {a.out}\n")
    else:
        out.write(text)
    jump, lo, hi = analysis.max_jump(rows)
    if lo is not None and (a.out or a.jump):
        out.write(f"# max jump {format_decimal(jump, 6)} between lambda {format_rational(lo)} and {format_rational(hi)}\n")
    return EXIT_OK


def cmd_export_lp(a, out, inp):
    text = export_lp(build_milp(_load(a.game)))
    if a.out:
        _write(a.out, text)
        out.write(f"wrote {a.out}\n")
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(a, out, inp):
    game = _load(a.game)
    f = parse_candidate(_read(a.candidate), game)
    report = check_average_property(f, game)
    if report:
        out.write("average property: HOLDS\n")
        return EXIT_OK
    out.write("average property: FAILS\n")
    for v, have, want in report.violations:
        out.write(f"  {v}: value {format_rational(have)}, operator gives {format_rational(want)}\n")
    return EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rhbg", description="Thresholds and plays of Robin Hood reachability bidding games.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="per-vertex thresholds")
    s.add_argument("game")
    s.add_argument("--method", default="auto", choices=["auto"] + [m.value for m in Method])
    s.add_argument("--tol", default=str(DEFAULT_TOL))
    s.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    s.add_argument("--cross-check", action="store_true", help="run every applicable method and compare")
    s.set_defaults(run=cmd_solve)

    s = sub.add_parser("classify", help="exact thresholds and their strength")
    s.add_argument("game")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("simulate", help="play two strategies against each other")
    s.add_argument("game")
    s.add_argument("--vertex", required=True)
    s.add_argument("--budget", required=True, help="Player 1's starting budget")
    s.add_argument("--p1", default="avg", help="avg | guard | script:FILE")
    s.add_argument("--p2", default="avg", help="avg | eps:E0 | script:FILE")
    s.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    s.add_argument("--digits", type=int, default=10)
    s.add_argument("--json", help="also write the trace as JSON here")
    s.set_defaults(run=cmd_simulate)

    s = sub.add_parser("play", help="play interactively on stdin")
    s.add_argument("game")
    s.add_argument("--as", dest="as_", choices=["p1", "p2"], required=True)
    s.add_argument("--vertex", required=True)
    s.add_argument("--budget", required=True, help="Player 1's starting budget")
    s.add_argument("--opponent", default="avg")
    s.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    s.set_defaults(run=cmd_play)

    s = sub.add_parser("sweep", help="threshold of one vertex over a lambda grid (CSV)")
    s.add_argument("game")
    s.add_argument("--vertex", required=True)
    s.add_argument("--grid", help="comma separated lambdas")
    s.add_argument("--steps", type=int, default=100, help="grid i/STEPS when --grid is absent")
    s.add_argument("--lo", default="0")
    s.add_argument("--hi", default="1/2")
    s.add_argument("--method", default="iterate", choices=[m.value for m in Method])
    s.add_argument("--tol", default=str(DEFAULT_TOL))
    s.add_argument("--max-iters", type=int)
    s.add_argument("--out")
    s.add_argument("--jump", action="store_true", help="report the largest adjacent change")
    s.set_defaults(run=cmd_sweep)

    s = sub.add_parser("export-lp", help="write the threshold MILP in LP format")
    s.add_argument("game")
    s.add_argument("--out")
    s.set_defaults(run=cmd_export_lp)

    s = sub.add_parser("check", help="test a candidate map for the average property")
    s.add_argument("game")
    s.add_argument("--candidate", required=True)
    s.set_defaults(run=cmd_check)
    return p


def run_cli(args, stdin=None, stdout=None) -> CommandResult:
    """Run one command; output is captured unless ``stdout`` is given."""
    out = stdout if stdout is not None else io.StringIO()
    err = io.StringIO()
    inp = stdin if stdin is not None else sys.stdin
    try:
        ns = build_parser().parse_args(list(args))
        code = ns.run(ns, out, inp)
    except SystemExit as exc:  # --help
        code = EXIT_OK if not exc.code else EXIT_DOMAIN
    except UsageError as exc:
        err.write(f"{exc}\n")
        code = EXIT_DOMAIN
    except InvariantError as exc:
        err.write(f"internal error: {exc}\n")
        code = EXIT_INVARIANT
    except GameError as exc:
        err.write(f"error: {exc}\n")
        code = EXIT_DOMAIN
    captured = out.getvalue() if stdout is None else ""
    return CommandResult(code, captured, err.getvalue())


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    res = run_cli(argv, sys.stdin, sys.stdout)
    sys.stderr.write(res.stderr)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
