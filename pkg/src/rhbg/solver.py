"""Threshold computation.

Three independent routes to the same function:

* :func:`solve_dag` - exact bottom-up propagation, acyclic games only;
* :func:`solve_iterate` - value iteration from the all-losing start, which
  decreases monotonically to the threshold;
* :func:`solve_enumerate` - exact oracle: enumerate which neighbours attain
  the min / max and which clamp branch applies at every vertex, maximize the
  sum of values over each piece with an exact LP, keep the best piece.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .avgprop import apply_average_operator, average_update, check_average_property
from .core import ONE, ZERO, Game, GameError, Method, ThresholdMap
from .simplex import LinearProgram, Status, presolve

log = logging.getLogger(__name__)

DEFAULT_TOL = Fraction(1, 10**12)
DEFAULT_MAX_ITERS = 200_000
ENUMERATION_LIMIT = 10**7

# value iteration stays exact until a denominator exceeds this many bits,
# after which iterates are rounded up onto a 2**-GRID_BITS grid
EXACT_BITS = 512
GRID_BITS = 384

CLAMP_LOW, CLAMP_MID, CLAMP_HIGH = "low", "mid", "high"


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


def solve_dag(game: Game) -> ThresholdMap:
    order = game.topological_order()
    if order is None:
        raise GameError("game graph has a cycle; use iterate or enumerate")
    values = {}
    for v in order:
        values[v] = average_update(values, v, game)
    values = {v: values[v] for v in game.vertices}
    report = check_average_property(values, game)
    if not report:
        raise InvariantError(f"DAG solution violates the average property at {report.violations}")
    return ThresholdMap(values, Method.DAG)


@dataclass
class IterationState:
    values: dict
    iteration: int
    max_delta: Fraction
    rounded: bool = False


def initial_iterate(game: Game) -> dict:
    return {v: (ZERO if v in game.targets else ONE) for v in game.vertices}


def _round_up(q: Fraction) -> Fraction:
    if q.denominator.bit_length() <= EXACT_BITS:
        return q
    scale = 1 << GRID_BITS
    return Fraction(-((-q.numerator * scale) // q.denominator), scale)


def _close_enough(delta, prev, tol) -> bool:
    # geometric tail bound delta * r / (1 - r), r estimated from the last two sweeps
    if delta >= tol or prev is None or delta >= prev:
        return False
    r = delta / prev
    return delta * r / (1 - r) < tol


def solve_iterate(game: Game, tol=DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS,
                  check_monotone: bool = True):
    """Value iteration from ``f_0`` (0 on targets, 1 elsewhere).

    Stops once the sup-norm change and its estimated geometric tail both
    drop below ``tol`` (an exact fixed point counts), else after
    ``max_iters`` sweeps. The returned values never
    underestimate the threshold. The map's ``residual`` is the exact
    sup-norm distance between the result and its own image under the
    operator (0 for an exact fixed point).
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise GameError("tol must be positive")
    if max_iters < 0:
        raise GameError("max_iters must be non-negative")
    f = initial_iterate(game)
    delta = ONE if game.non_sinks else ZERO
    prev = None
    rounded = False
    n = 0
    while n < max_iters:
        image = apply_average_operator(f, game)
        nxt = {}
        for v, y in image.items():
            if y > f[v]:
                if check_monotone:
                    raise InvariantError(f"iteration increased at {v}: {f[v]} -> {y}")
                y = f[v]
            r = _round_up(y)
            if r != y:
                rounded = True
            nxt[v] = min(r, f[v])
        n += 1
        delta = max((f[v] - nxt[v] for v in game.vertices), default=ZERO)
        f = nxt
        if delta == 0 or _close_enough(delta, prev, tol):
            break
        prev = delta
    residual = max((abs(y - f[v]) for v, y in apply_average_operator(f, game).items()), default=ZERO)
    state = IterationState(f, n, delta, rounded)
    th = ThresholdMap(dict(f), Method.ITERATE, residual, n, {"max_delta": delta, "rounded": rounded})
    return th, state


def iterate_values(game: Game, sweeps: int) -> dict:
    """Exactly ``sweeps`` applications of the operator to ``f_0`` (no rounding)."""
    f = initial_iterate(game)
    for _ in range(sweeps):
        f = apply_average_operator(f, game)
    return f


# -- enumeration oracle -----------------------------------------------------

def vertex_regimes(game: Game, v: str) -> list:
    """All (argmin, argmax, clamp) choices at non-sink ``v``.

    With two or more neighbours the min and max representatives are distinct
    vertices; ties are still covered because the ordering constraints are
    non-strict. With exactly two neighbours the average does not depend on
    which one is the min, so a single unordered choice (``None`` marker in
    place of the ordering) is enough.
    """
    nbrs = game.neighbors(v)
    if len(nbrs) == 1:
        pairs = [(nbrs[0], nbrs[0])]
    elif len(nbrs) == 2:
        pairs = [(nbrs[0], nbrs[1], None)]
        return [(i, j, c) for i, j, _ in pairs for c in (CLAMP_HIGH, CLAMP_MID, CLAMP_LOW)]
    else:
        pairs = [(i, j) for i in nbrs for j in nbrs if i != j]
    return [(i, j, c) for i, j in pairs for c in (CLAMP_HIGH, CLAMP_MID, CLAMP_LOW)]


def regime_count(game: Game) -> int:
    return math.prod(len(vertex_regimes(game, v)) for v in game.non_sinks)


def fvar(v: str) -> str:
    return f"f[{v}]"


def base_program(game: Game) -> LinearProgram:
    lp = LinearProgram()
    for v in game.vertices:
        if game.is_sink(v):
            val = game.sink_value(v)
            lp.add_variable(fvar(v), val, val)
        else:
            lp.add_variable(fvar(v), ZERO, ONE)
    lp.objective = {fvar(v): ONE for v in game.vertices}
    return lp


def regime_rows(game: Game, v: str, regime) -> list:
    """Constraints ``(coeffs, sense, rhs)`` pinning ``v`` to one regime."""
    i, j, clamp = regime
    lam = game.lam
    nbrs = game.neighbors(v)
    rows = []
    for u in nbrs if len(nbrs) > 2 else ():
        if u != i:
            rows.append(({fvar(i): 1, fvar(u): -1}, "<=", 0))
        if u != j:
            rows.append(({fvar(u): 1, fvar(j): -1}, "<=", 0))
    # fpre = (f_i + f_j) / (2 (1 - 2 lam)) - lam / (1 - 2 lam)
    k = 1 / (2 * (1 - 2 * lam))
    pre = {fvar(i): 2 * k} if i == j else {fvar(i): k, fvar(j): k}
    c0 = lam / (1 - 2 * lam)
    if clamp == CLAMP_LOW:
        rows.append(({fvar(v): 1}, "==", 0))
        rows.append((pre, "<=", c0))
    elif clamp == CLAMP_HIGH:
        rows.append(({fvar(v): 1}, "==", 1))
        rows.append((pre, ">=", 1 + c0))
    else:
        eq = dict(pre)
        eq[fvar(v)] = eq.get(fvar(v), ZERO) - 1
        rows.append((eq, "==", c0))
        rows.append((pre, ">=", c0))
        rows.append((pre, "<=", 1 + c0))
    return rows


def add_regime(lp: LinearProgram, game: Game, v: str, regime) -> None:
    for coeffs, sense, rhs in regime_rows(game, v, regime):
        lp.add_constraint(coeffs, sense, rhs)


def search_order(game: Game) -> list:
    """Non-sinks ordered by backward BFS distance from the sinks, so that
    vertices whose neighbours are pinned get branched on first."""
    preds = {v: [] for v in game.vertices}
    for u, w in game.edges:
        preds[w].append(u)
    dist = {v: 0 for v in game.sinks}
    frontier = list(game.sinks)
    while frontier:
        nxt = []
        for w in frontier:
            for u in preds[w]:
                if u not in dist:
                    dist[u] = dist[w] + 1
                    nxt.append(u)
        frontier = nxt
    far = len(game.vertices) + 1
    return sorted(game.non_sinks, key=lambda v: (dist.get(v, far), game.index[v]))


@dataclass
class EnumerationStats:
    regimes_total: int
    lp_solves: int = 0
    leaves_feasible: int = 0


def solve_enumerate(game: Game, limit: int = ENUMERATION_LIMIT) -> ThresholdMap:
    """Exact threshold as the pointwise-largest solution of the average property."""
    total = regime_count(game)
    if total > limit:
        raise GameError(f"enumeration size guard: {total} regime combinations exceed {limit}")
    stats = EnumerationStats(total)
    order = search_order(game)
    best = [None, None]  # value, point

    base = base_program(game)
    objective = base.objective

    def visit(depth, red):
        if red is None:
            return
        stats.lp_solves += 1
        leaf = depth == len(order)
        res = red.maximize(objective if leaf else {})
        if res.status is not Status.OPTIMAL:
            if res.status is Status.UNBOUNDED:
                raise InvariantError("bounded program reported unbounded")
            return
        if leaf:
            stats.leaves_feasible += 1
            if best[0] is None or res.value > best[0]:
                best[0], best[1] = res.value, res.point
            return
        v = order[depth]
        for regime in vertex_regimes(game, v):
            visit(depth + 1, red.extend(regime_rows(game, v, regime)))

    visit(0, presolve(base))
    if best[1] is None:
        raise InvariantError("no regime of the average property is feasible")
    values = {v: best[1][fvar(v)] for v in game.vertices}
    report = check_average_property(values, game)
    if not report:
        raise InvariantError(f"enumeration optimum violates the average property: {report.violations}")
    log.debug("enumerate: %s", stats)
    return ThresholdMap(values, Method.ENUMERATE, ZERO, 0, {"stats": stats})


def solve(game: Game, method="auto", tol=DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS,
          limit: int = ENUMERATION_LIMIT) -> ThresholdMap:
    """Dispatch on ``method``; ``auto`` picks dag, then enumerate under the size guard, then iterate."""
    if method == "auto":
        if game.is_acyclic():
            method = Method.DAG
        elif regime_count(game) <= limit:
            method = Method.ENUMERATE
        else:
            method = Method.ITERATE
    method = Method(method)
    if method is Method.DAG:
        return solve_dag(game)
    if method is Method.ITERATE:
        return solve_iterate(game, tol, max_iters)[0]
    if method is Method.ENUMERATE:
        return solve_enumerate(game, limit)
    from .milp import solve_milp_threshold

    return solve_milp_threshold(game)
