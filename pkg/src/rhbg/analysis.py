"""Closed forms for the two-cycle game and threshold sweeps over lambda.

The two-cycle game has ``vleft -> {v2, vright}`` and ``vright -> {vleft, v1}``
with target ``v1``. While the play oscillates, one left-right round maps
Player 1's budget vector by ``M = B_right . WR . B_left . WR``.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import (HALF, ONE, ZERO, Game, GameError, Strength, format_decimal, format_rational, make_game,
                   parse_rational, simplest_within)
from .solver import DEFAULT_TOL, InvariantError, solve

B_LEFT = ((ONE, -ONE), (ZERO, Fraction(2)))
B_RIGHT = ((Fraction(2), ZERO), (-ONE, ONE))


def two_cycle_game(lam) -> Game:
    return make_game(["vleft", "v2", "vright", "v1"],
                     [("vleft", "v2"), ("vleft", "vright"), ("vright", "vleft"), ("vright", "v1")],
                     ["v1"], lam)


def matmul(a, b):
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(2)), ZERO) for j in range(2)) for i in range(2))


def matvec(a, v):
    return tuple(sum((a[i][k] * v[k] for k in range(2)), ZERO) for i in range(2))


def wr_matrix(lam: Fraction):
    return ((1 - lam, lam), (lam, 1 - lam))


def check_lambda(lam) -> Fraction:
    lam = parse_rational(lam)
    if not (ZERO <= lam < HALF):
        raise GameError(f"lambda out of range: {format_rational(lam)} not in [0, 1/2)")
    return lam


def cycle_matrix(lam):
    w = wr_matrix(lam)
    return matmul(matmul(matmul(B_RIGHT, w), B_LEFT), w)


def eigenvalue2(lam):
    return 16 * lam * lam - 16 * lam + 4


def x_fix(lam):
    return (2 * lam - 2) / (4 * lam - 3)


def forward_right(x, lam):
    """Player 1's post-redistribution budget at vright as a function of the budget at vleft."""
    return 2 * (1 - 2 * lam) ** 2 * x + 5 * lam - 4 * lam * lam - 1


def f_rev(y, lam):
    """Inverse of :func:`forward_right`."""
    return (4 * lam * lam - 5 * lam + y + 1) / (2 * (2 * lam - 1) ** 2)


@dataclass(frozen=True)
class TwoCycleReport:
    lam: Fraction
    M: tuple
    eigenvalue1: Fraction
    eigenvalue2: Fraction
    x_fix: Fraction
    f_rev_half: Fraction

    def check(self) -> None:
        (a, b), (c, d) = self.M
        if a + d != self.eigenvalue1 + self.eigenvalue2:
            raise InvariantError("trace(M) != sum of eigenvalues")
        if a * d - b * c != self.eigenvalue1 * self.eigenvalue2:
            raise InvariantError("det(M) != product of eigenvalues")
        fixed = (self.x_fix, 1 - self.x_fix)
        if matvec(self.M, fixed) != fixed:
            raise InvariantError("M does not fix (x_fix, 1 - x_fix)")
        if matvec(self.M, (-ONE, ONE)) != (-self.eigenvalue2, self.eigenvalue2):
            raise InvariantError("(-1, 1) is not an eigenvector for eigenvalue2")

    def lines(self) -> list:
        r = format_rational
        return [
            f"lambda {r(self.lam)}",
            f"M [[{r(self.M[0][0])}, {r(self.M[0][1])}], [{r(self.M[1][0])}, {r(self.M[1][1])}]]",
            f"eigenvalues {r(self.eigenvalue1)} {r(self.eigenvalue2)}",
            f"x_fix {r(self.x_fix)}",
            f"f_rev(1/2) {r(self.f_rev_half)}",
        ]


def two_cycle_report(lam) -> TwoCycleReport:
    lam = check_lambda(lam)
    rep = TwoCycleReport(lam, cycle_matrix(lam), ONE, eigenvalue2(lam), x_fix(lam), f_rev(HALF, lam))
    rep.check()
    return rep


def tau_closed_form(lam) -> tuple:
    """Threshold of vleft in the two-cycle game and its strength."""
    lam = check_lambda(lam)
    if lam < Fraction(1, 4):
        return x_fix(lam), Strength.ONE_STRONG
    if lam == Fraction(1, 4):
        return ONE, Strength.ONE_STRONG
    return ONE, Strength.TWO_STRONG


# -- sweeps -----------------------------------------------------------------

@dataclass
class SweepRow:
    lam: Fraction
    threshold: Fraction | None
    residual: Fraction | None
    method: str
    error: str = ""
    tol: Fraction = ZERO

    @property
    def shown(self) -> Fraction:
        """The threshold, or the simplest rational within ``tol`` of an approximate one."""
        if self.residual == 0:
            return self.threshold
        return simplest_within(self.threshold, self.tol)


def lambda_grid(n: int, lo=ZERO, hi=HALF) -> list:
    """The points ``i/n`` lying in ``[lo, hi)``."""
    if n <= 0:
        raise GameError("grid size must be positive")
    lo, hi = parse_rational(lo), parse_rational(hi)
    return [Fraction(i, n) for i in range(n + 1) if lo <= Fraction(i, n) < hi]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("RHBG_THREADS", "1")))
    except ValueError:
        return 1


def sweep(game: Game, vertex: str, grid, method="iterate", tol=DEFAULT_TOL, max_iters=None,
          workers: int | None = None) -> list:
    """Solve ``game`` at every lambda in ``grid``; errors are reported per row."""
    if vertex not in game.index:
        raise GameError(f"unknown vertex {vertex}")
    grid = sorted(parse_rational(x) for x in grid)
    tol = parse_rational(tol)
    kwargs = {"tol": tol}
    if max_iters is not None:
        kwargs["max_iters"] = max_iters

    def one(lam):
        try:
            th = solve(game.with_lambda(lam), method, **kwargs)
        except (GameError, InvariantError) as exc:
            return SweepRow(lam, None, None, str(method), str(exc))
        return SweepRow(lam, th[vertex], th.residual, th.method.value, tol=tol)

    workers = workers or default_workers()
    if workers == 1:
        return [one(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, grid))


def max_jump(rows) -> tuple:
    """Largest change of the threshold between consecutive solved grid points."""
    best = (ZERO, None, None)
    ok = [r for r in rows if r.threshold is not None]
    for a, b in zip(ok, ok[1:]):
        d = abs(b.threshold - a.threshold)
        if d > best[0]:
            best = (d, a.lam, b.lam)
    return best


CSV_HEADER = ["lambda", "threshold", "residual", "method", "lambda_decimal", "threshold_decimal", "error"]


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        solved = r.threshold is not None
        w.writerow([
            format_rational(r.lam),
            format_rational(r.shown) if solved else "",
            format_decimal(r.residual) if solved else "",
            r.method,
            format_decimal(r.lam),
            format_decimal(r.threshold) if solved else "",
            r.error,
        ])
    return buf.getvalue()
