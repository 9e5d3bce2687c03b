"""Which player can win exactly at the threshold budget.

For ``lam > 0`` every sink gets a self-loop (on an internal view only) and
the vertices are split by their pre-redistribution requirement. The middle
band is decided by reachability in the "good" subgraph, falling back to a
turn-based reachability game. ``lam == 0`` reduces to plain graph
reachability of the targets.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .avgprop import check_average_property, wr_inv
from .core import ZERO, Game, GameError, Strength, ThresholdMap
from .solver import InvariantError


@dataclass(frozen=True)
class VertexPartition:
    v1: frozenset  # Th_pre < 0
    v2: frozenset  # Th_pre > 1
    vmid: frozenset

    def part_of(self, v) -> str:
        return "V1" if v in self.v1 else "V2" if v in self.v2 else "Vmid"


@dataclass(frozen=True)
class ChoiceNode:
    """Player 2's position after Player 1 declines to win the bidding at ``vertex``."""

    vertex: str

    def __str__(self):
        return f"choice({self.vertex})"


@dataclass
class TurnBasedGame:
    p1_positions: tuple
    p2_positions: tuple
    edges: dict  # position -> tuple of positions
    p1_targets: frozenset  # reaching these wins for Player 1
    p2_targets: frozenset  # reaching these wins for Player 2

    @property
    def positions(self):
        return self.p1_positions + self.p2_positions + tuple(self.p1_targets) + tuple(self.p2_targets)


def _values(th):
    return th.values if isinstance(th, ThresholdMap) else th


def _nbrs(game: Game, v: str) -> tuple:
    # sinks behave as if they had a self-loop
    return game.neighbors(v) or (v,)


def minimizers(game: Game, th, v: str) -> tuple:
    f = _values(th)
    nb = _nbrs(game, v)
    lo = min(f[u] for u in nb)
    return tuple(u for u in nb if f[u] == lo)


def maximizers(game: Game, th, v: str) -> tuple:
    f = _values(th)
    nb = _nbrs(game, v)
    hi = max(f[u] for u in nb)
    return tuple(u for u in nb if f[u] == hi)


def th_pre(game: Game, th, v: str):
    f = _values(th)
    nb = _nbrs(game, v)
    return wr_inv((min(f[u] for u in nb) + max(f[u] for u in nb)) / 2, game.lam)


def _require_exact(game: Game, th) -> dict:
    if isinstance(th, ThresholdMap) and not th.exact:
        raise GameError("strength classification needs an exact threshold (iterate did not reach a fixed point)")
    f = _values(th)
    missing = [v for v in game.vertices if v not in f]
    if missing:
        raise GameError(f"threshold missing for {', '.join(missing)}")
    report = check_average_property(f, game)
    if not report:
        bad = ", ".join(v for v, _, _ in report.violations)
        raise GameError(f"threshold violates the average property at {bad}; refusing to classify")
    return f


def partition_vertices(game: Game, th) -> VertexPartition:
    if game.lam == 0:
        raise GameError("partition is defined for lambda > 0; use classify_lambda_zero")
    v1, v2, mid = set(), set(), set()
    for v in game.vertices:
        p = th_pre(game, th, v)
        (v1 if p < 0 else v2 if p > 1 else mid).add(v)
    return VertexPartition(frozenset(v1), frozenset(v2), frozenset(mid))


def build_g_good(game: Game, th, partition: VertexPartition | None = None) -> dict:
    """Adjacency of the good subgraph: V2 removed, only edges to threshold-minimizing neighbours."""
    partition = partition or partition_vertices(game, th)
    out = {}
    for u in game.vertices:
        if u in partition.v2:
            continue
        out[u] = tuple(w for w in minimizers(game, th, u) if w not in partition.v2)
    return out


def can_reach(adj: dict, goal) -> set:
    """Vertices of ``adj`` with a path (possibly empty) into ``goal``."""
    preds = {}
    for u, ws in adj.items():
        for w in ws:
            preds.setdefault(w, []).append(u)
    seen = {g for g in goal if g in adj or g in preds}
    todo = deque(seen)
    while todo:
        w = todo.popleft()
        for u in preds.get(w, ()):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


def build_turn_based(game: Game, th, partition: VertexPartition | None = None) -> TurnBasedGame:
    partition = partition or partition_vertices(game, th)
    mids = tuple(v for v in game.vertices if v in partition.vmid)
    edges = {}
    for u in mids:
        c = ChoiceNode(u)
        edges[u] = minimizers(game, th, u) + (c,)
        edges[c] = maximizers(game, th, u)
    return TurnBasedGame(mids, tuple(ChoiceNode(u) for u in mids), edges, partition.v1, partition.v2)


def solve_turn_based(tb: TurnBasedGame) -> set:
    """Player 1's attractor to ``p1_targets`` (least fixed point)."""
    attr = set(tb.p1_targets)
    preds = {}
    for p, succ in tb.edges.items():
        for q in succ:
            preds.setdefault(q, []).append(p)
    p2 = set(tb.p2_positions)
    remaining = {p: len(tb.edges[p]) for p in p2}
    todo = deque(attr)
    while todo:
        q = todo.popleft()
        for p in preds.get(q, ()):
            if p in attr:
                continue
            if p in p2:
                remaining[p] -= 1
                if remaining[p]:
                    continue
            attr.add(p)
            todo.append(p)
    return attr


@dataclass
class Classification:
    strengths: dict
    partition: VertexPartition | None = None
    good_reach: set = field(default_factory=set)
    attractor: set = field(default_factory=set)

    def __getitem__(self, v):
        return self.strengths[v]


def classify_lambda_zero(game: Game, th) -> dict:
    if game.lam != 0:
        raise GameError("classify_lambda_zero requires lambda = 0")
    preds = {v: [] for v in game.vertices}
    for u, w in game.edges:
        preds[w].append(u)
    reach = set(game.targets)
    todo = deque(reach)
    while todo:
        w = todo.popleft()
        for u in preds[w]:
            if u not in reach:
                reach.add(u)
                todo.append(u)
    return {v: Strength.ONE_STRONG if v in reach else Strength.TWO_STRONG for v in game.vertices}


def classify_detailed(game: Game, th) -> Classification:
    f = _require_exact(game, th)
    if game.lam == 0:
        return Classification(classify_lambda_zero(game, f))
    part = partition_vertices(game, f)
    good = build_g_good(game, f, part)
    reach = can_reach(good, part.v1)
    attr = solve_turn_based(build_turn_based(game, f, part))
    out = {}
    for v in game.vertices:
        if v in part.v1:
            out[v] = Strength.ONE_STRONG
        elif v in part.v2:
            out[v] = Strength.TWO_STRONG
        elif v in reach:
            out[v] = Strength.ONE_STRONG
        elif v in attr:
            out[v] = Strength.WEAK
        else:
            out[v] = Strength.TWO_STRONG
    if game.is_acyclic():
        _dag_cross_check(game, f, out)
    return Classification(out, part, reach, attr)


def classify(game: Game, th) -> dict:
    """Vertex -> :class:`Strength` for an exact threshold ``th``."""
    return classify_detailed(game, th).strengths


def _dag_cross_check(game: Game, f: dict, out: dict) -> None:
    # on DAGs a non-sink is 1-strong exactly when Th_pre <= 1, 2-strong otherwise
    for v in game.non_sinks:
        want = Strength.ONE_STRONG if th_pre(game, f, v) <= 1 else Strength.TWO_STRONG
        if out[v] is not want:
            raise InvariantError(f"DAG strength mismatch at {v}: procedure {out[v]}, closed form {want}")
    for v in game.sinks:
        want = Strength.ONE_STRONG if f[v] == ZERO else Strength.TWO_STRONG
        if out[v] is not want:
            raise InvariantError(f"sink {v} classified {out[v]}")
