"""Wealth redistribution and the average-property operator.

Everything here is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import ONE, ZERO, Game, GameError


def wr(x: Fraction, lam: Fraction) -> Fraction:
    """Player 1's budget after wealth redistribution: ``(1 - 2*lam)*x + lam``."""
    return (1 - 2 * lam) * x + lam


def wr_inv(y: Fraction, lam: Fraction) -> Fraction:
    """Inverse of :func:`wr`. The result may fall outside [0, 1]."""
    return (y - lam) / (1 - 2 * lam)


def wr_pair(x: Fraction, y: Fraction, lam: Fraction) -> tuple:
    """Apply redistribution to a budget vector ``(x, y)`` as a 2x2 matrix."""
    return ((1 - lam) * x + lam * y, lam * x + (1 - lam) * y)


def clamp01(x: Fraction) -> Fraction:
    return max(min(x, ONE), ZERO)


@dataclass(frozen=True)
class AvgTriple:
    vminus: str
    vplus: str
    favg: Fraction
    fpre: Fraction
    fdiff: Fraction


def extremal_neighbors(f: Mapping, v: str, game: Game) -> tuple:
    """First minimizing and first maximizing neighbor of ``v`` in canonical order."""
    nbrs = game.neighbors(v)
    if not nbrs:
        raise GameError(f"vertex {v} is a sink")
    lo = hi = nbrs[0]
    for u in nbrs[1:]:
        if f[u] < f[lo]:
            lo = u
        if f[u] > f[hi]:
            hi = u
    return lo, hi


def tied_neighbors(f: Mapping, v: str, game: Game) -> tuple:
    """The full sets ``(N-, N+)`` of neighbors attaining the min / max of ``f``."""
    nbrs = game.neighbors(v)
    if not nbrs:
        raise GameError(f"vertex {v} is a sink")
    lo = min(f[u] for u in nbrs)
    hi = max(f[u] for u in nbrs)
    return (tuple(u for u in nbrs if f[u] == lo), tuple(u for u in nbrs if f[u] == hi))


def avg_triple(f: Mapping, v: str, game: Game) -> AvgTriple:
    vm, vp = extremal_neighbors(f, v, game)
    favg = (f[vp] + f[vm]) / 2
    fdiff = (f[vp] - f[vm]) / 2
    return AvgTriple(vm, vp, favg, wr_inv(favg, game.lam), fdiff)


def fpre(f: Mapping, v: str, game: Game) -> Fraction:
    """Pre-redistribution requirement at ``v``; sinks use their own value as the only neighbor."""
    if game.is_sink(v):
        return wr_inv(f[v], game.lam)
    return avg_triple(f, v, game).fpre


def average_update(f: Mapping, v: str, game: Game) -> Fraction:
    if game.is_sink(v):
        return game.sink_value(v)
    return clamp01(avg_triple(f, v, game).fpre)


def apply_average_operator(f: Mapping, game: Game) -> dict:
    """One simultaneous sweep of the average-property operator."""
    return {v: average_update(f, v, game) for v in game.vertices}


@dataclass
class AverageReport:
    holds: bool
    violations: list  # (vertex, lhs f(v), rhs operator value)

    def __bool__(self):
        return self.holds


def check_average_property(f: Mapping, game: Game) -> AverageReport:
    image = apply_average_operator(f, game)
    bad = [(v, f[v], image[v]) for v in game.vertices if f[v] != image[v]]
    return AverageReport(not bad, bad)
