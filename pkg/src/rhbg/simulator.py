"""Play execution: redistribution, sealed bids (ties to Player 1), moves.

Strategies are small objects with ``decide(ctx) -> Action`` and ``reset()``.
Every strategy except the epsilon schedule and scripts is memoryless.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .avgprop import avg_triple, check_average_property, tied_neighbors, wr
from .core import ONE, ZERO, Configuration, Game, GameError, format_decimal, format_rational, parse_rational

DEFAULT_MAX_STEPS = 10_000


class SimulationError(GameError):
    pass


class OverbidError(SimulationError):
    pass


class IllegalMoveError(SimulationError):
    pass


class Status(str, enum.Enum):
    P1_WINS = "P1Wins"
    P2_WINS = "P2Wins"
    TRUNCATED = "Truncated"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Action:
    bid: Fraction
    move: str
    note: str | None = None


@dataclass(frozen=True)
class Context:
    """What a strategy sees when bidding: budgets are post-redistribution."""

    game: Game
    vertex: str
    player: int
    budget: Fraction
    opponent: Fraction
    pre_budget: Fraction  # own budget before redistribution
    round: int


class Strategy:
    name = "strategy"

    def decide(self, ctx: Context) -> Action | None:
        raise NotImplementedError

    def reset(self) -> None:
        pass

    def __repr__(self):
        return f"<{self.name}>"


@dataclass
class Step:
    round: int
    vertex: str
    x: Fraction  # P1 budget before redistribution
    wr1: Fraction
    wr2: Fraction
    bid1: Fraction
    bid2: Fraction
    winner: int
    move: str
    x_next: Fraction
    forfeit: int | None = None
    notes: tuple = ()

    @property
    def y(self):
        return ONE - self.x

    @property
    def y_next(self):
        return ONE - self.x_next


@dataclass
class PlayTrace:
    start: Configuration
    steps: list = field(default_factory=list)
    status: Status = Status.TRUNCATED
    final: Configuration | None = None

    def configurations(self) -> list:
        """Every pre-redistribution configuration, including the start."""
        out = [(self.start.vertex, self.start.budget1)]
        out += [(s.move, s.x_next) for s in self.steps]
        return out

    def budget_points(self) -> list:
        """All recorded (P1, P2) budget pairs."""
        pts = [(self.start.budget1, self.start.budget2)]
        for s in self.steps:
            pts += [(s.wr1, s.wr2), (s.x_next, s.y_next)]
        return pts

    def to_text(self, digits: int = 10) -> str:
        def d(q):
            return format_decimal(q, digits)

        lines = [f"start {self.start.vertex} budgets ({d(self.start.budget1)}, {d(self.start.budget2)})"]
        for s in self.steps:
            lines.append(f"round {s.round} at {s.vertex}: budgets ({d(s.x)}, {d(s.y)})")
            lines.append(f"  WR -> ({d(s.wr1)}, {d(s.wr2)})")
            extra = f" [P{s.forfeit} forfeits]" if s.forfeit else ""
            lines.append(f"  bids P1 {d(s.bid1)}, P2 {d(s.bid2)} -> P{s.winner} wins{extra}, moves to {s.move}")
            lines.append(f"  budgets ({d(s.x_next)}, {d(s.y_next)})")
            for note in s.notes:
                lines.append(f"  note: {note}")
        lines.append(f"end at {self.final.vertex}: {self.status}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        r = format_rational
        return {
            "start": {"vertex": self.start.vertex, "budget1": r(self.start.budget1)},
            "status": self.status.value,
            "final": {"vertex": self.final.vertex, "budget1": r(self.final.budget1)},
            "steps": [
                {
                    "round": s.round, "vertex": s.vertex, "budget1": r(s.x), "wr1": r(s.wr1), "wr2": r(s.wr2),
                    "bid1": r(s.bid1), "bid2": r(s.bid2), "winner": s.winner, "move": s.move,
                    "budget1_next": r(s.x_next), "forfeit": s.forfeit, "notes": list(s.notes),
                }
                for s in self.steps
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_action(game: Game, v: str, a: Action | None, budget: Fraction, who: int) -> None:
    if a is None:
        raise SimulationError(f"P{who} produced no action")
    if not isinstance(a.bid, Fraction):
        raise SimulationError(f"P{who} bid {a.bid!r} is not an exact rational")
    if a.bid < 0 or a.bid > budget:
        raise OverbidError(f"P{who} bid {format_rational(a.bid)} outside [0, {format_rational(budget)}]")
    if a.move not in game.neighbors(v):
        raise IllegalMoveError(f"P{who} move {a.move!r} is not a neighbour of {v}")


def resolve_round(game: Game, config: Configuration, a1: Action, a2: Action, round_no: int = 1):
    """One round from ``config``; returns ``(next_config, Step)``."""
    v = config.vertex
    if game.is_sink(v):
        raise SimulationError(f"no round to play at sink {v}")
    w1 = wr(config.budget1, game.lam)
    w2 = ONE - w1
    _check_action(game, v, a1, w1, 1)
    _check_action(game, v, a2, w2, 2)
    if a1.bid >= a2.bid:
        winner, move, x_next = 1, a1.move, w1 - a1.bid
    else:
        winner, move, x_next = 2, a2.move, w1 + a2.bid
    notes = tuple(n for n in (a1.note, a2.note) if n)
    step = Step(round_no, v, config.budget1, w1, w2, a1.bid, a2.bid, winner, move, x_next, None, notes)
    return Configuration(move, x_next), step


def run_play(game: Game, start: Configuration, s1: Strategy, s2: Strategy,
             max_steps: int = DEFAULT_MAX_STEPS) -> PlayTrace:
    if start.vertex not in game.index:
        raise GameError(f"unknown start vertex {start.vertex}")
    s1.reset()
    s2.reset()
    trace = PlayTrace(start)
    config = start
    for n in range(1, max_steps + 1):
        v = config.vertex
        if game.is_sink(v):
            break
        w1 = wr(config.budget1, game.lam)
        w2 = ONE - w1
        a1 = s1.decide(Context(game, v, 1, w1, w2, config.budget1, n))
        a2 = s2.decide(Context(game, v, 2, w2, w1, config.budget2, n))
        bad = []
        for who, a, budget in ((1, a1, w1), (2, a2, w2)):
            try:
                _check_action(game, v, a, budget, who)
            except SimulationError as exc:
                bad.append((who, str(exc)))
        if len(bad) == 2:
            raise SimulationError(f"both players produced invalid actions: {bad[0][1]}; {bad[1][1]}")
        if bad:
            # the offender forfeits: the opponent wins the bidding with bid 0
            loser, msg = bad[0]
            winner = 3 - loser
            move = (a2 if winner == 2 else a1).move
            step = Step(n, v, config.budget1, w1, w2, ZERO, ZERO, winner, move, w1, loser, (msg,))
            config = Configuration(move, w1)
        else:
            config, step = resolve_round(game, config, a1, a2, n)
        trace.steps.append(step)
    v = config.vertex
    if game.is_sink(v):
        trace.status = Status.P1_WINS if v in game.targets else Status.P2_WINS
    else:
        trace.status = Status.TRUNCATED
    trace.final = config
    return trace


# -- strategies -------------------------------------------------------------

def _require_avg(f, game: Game) -> dict:
    f = dict(f.values if hasattr(f, "values") and not isinstance(f, dict) else f)
    report = check_average_property(f, game)
    if not report:
        raise GameError(f"values violate the average property at {', '.join(v for v, _, _ in report.violations)}")
    return f


def _minimizer_reach(game: Game, f: dict) -> set:
    """Vertices with a path to the targets using only threshold-minimizing moves."""
    preds = {v: [] for v in game.vertices}
    for u in game.non_sinks:
        for w in tied_neighbors(f, u, game)[0]:
            preds[w].append(u)
    seen = set(game.targets)
    todo = list(seen)
    while todo:
        w = todo.pop()
        for u in preds[w]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen


class AverageP1(Strategy):
    """Bid f_diff (capped at the budget) and move to a minimizing neighbour.

    With ``strength_aware`` the minimizing neighbour is chosen on a path of
    minimizing moves to the targets when one exists; otherwise the first one
    in canonical order.
    """

    def __init__(self, f, game: Game, strength_aware: bool = False):
        self.f = _require_avg(f, game)
        self.reach = _minimizer_reach(game, self.f) if strength_aware else set()
        self.name = "avg-p1" + ("+strong" if strength_aware else "")

    def _move(self, ctx):
        t = avg_triple(self.f, ctx.vertex, ctx.game)
        if self.reach:
            for u in tied_neighbors(self.f, ctx.vertex, ctx.game)[0]:
                if u in self.reach:
                    return t, u
        return t, t.vminus

    def decide(self, ctx):
        t, move = self._move(ctx)
        return Action(min(t.fdiff, ctx.budget), move)


class GuardP1(AverageP1):
    """The average strategy, except next to a losing sink: there it outbids
    Player 2's whole budget when affordable, since losing that bidding loses
    the game."""

    def __init__(self, f, game: Game, strength_aware: bool = False):
        super().__init__(f, game, strength_aware)
        self.name = "guard-p1"

    def decide(self, ctx):
        t, move = self._move(ctx)
        game = ctx.game
        danger = any(game.is_sink(u) and u not in game.targets for u in game.neighbors(ctx.vertex))
        if danger and ctx.opponent <= ctx.budget:
            return Action(ctx.opponent, move)
        return Action(min(t.fdiff, ctx.budget), move)


def geometric_schedule(eps0) -> Callable[[int], Fraction]:
    e0 = parse_rational(eps0)
    if e0 < 0:
        raise GameError("epsilon must be non-negative")
    return lambda n: e0 / (1 << n)


class AverageP2(Strategy):
    """Bid f_diff and move to a maximizing neighbour.

    With an epsilon schedule the strategy also presses its advantage: next
    to a losing sink it outbids Player 1's whole budget by ``eps_n`` when it
    can afford to and moves there; next to a target it bids
    ``min(f_diff, P1 budget) + eps_n`` so Player 1 cannot tie. ``n`` counts
    the epsilon bids made so far in the play.
    """

    def __init__(self, f, game: Game, epsilons: Callable[[int], Fraction] | None = None):
        self.f = _require_avg(f, game)
        self.eps = epsilons
        self.n = 0
        self.name = "avg-p2" if epsilons is None else "eps-p2"

    def reset(self):
        self.n = 0

    def decide(self, ctx):
        game, v = ctx.game, ctx.vertex
        t = avg_triple(self.f, v, game)
        if self.eps is None:
            return Action(min(t.fdiff, ctx.budget), t.vplus)
        e = self.eps(self.n)
        nbrs = game.neighbors(v)
        losing = [u for u in nbrs if game.is_sink(u) and u not in game.targets]
        if e > 0 and losing and ctx.opponent + e <= ctx.budget:
            self.n += 1
            return Action(ctx.opponent + e, losing[0])
        if any(u in game.targets for u in nbrs):
            self.n += 1
            bid = min(t.fdiff, ctx.opponent) + e
            if bid > ctx.budget:
                return Action(ctx.budget, t.vplus, f"P2 epsilon bid capped at budget {format_rational(ctx.budget)}")
            return Action(bid, t.vplus)
        return Action(min(t.fdiff, ctx.budget), t.vplus)


class Scripted(Strategy):
    """Replays a fixed list of actions; runs out -> no action (forfeit)."""

    def __init__(self, actions: Sequence[Action], name: str = "script"):
        self.actions = list(actions)
        self.i = 0
        self.name = name

    def reset(self):
        self.i = 0

    def decide(self, ctx):
        if self.i >= len(self.actions):
            return None
        a = self.actions[self.i]
        self.i += 1
        return a


class Fixed(Strategy):
    """Memoryless table strategy: ``rule(ctx) -> Action``."""

    def __init__(self, rule: Callable[[Context], Action], name: str = "fixed"):
        self.rule = rule
        self.name = name

    def decide(self, ctx):
        return self.rule(ctx)


def parse_script(text: str) -> list:
    """Lines ``<bid> <move>``; blank lines and ``#`` comments ignored."""
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GameError(f"script line {ln}: expected '<bid> <move>'")
        out.append(Action(parse_rational(parts[0]), parts[1]))
    return out


class Interactive(Strategy):
    """Asks a human for each bid and move, re-prompting until valid."""

    def __init__(self, read: Callable[[str], str], write: Callable[[str], None]):
        self.read = read
        self.write = write
        self.name = "human"

    def decide(self, ctx):
        nbrs = ctx.game.neighbors(ctx.vertex)
        self.write(f"round {ctx.round} at {ctx.vertex}: your budget {format_rational(ctx.budget)}"
                   f" (~{format_decimal(ctx.budget, 6)}), opponent {format_rational(ctx.opponent)}")
        while True:
            try:
                text = self.read(f"bid and move (neighbours: {' '.join(nbrs)}): ")
            except EOFError:
                raise SimulationError("input closed") from None
            parts = text.split()
            if len(parts) != 2:
                self.write("enter two fields: <bid> <move>")
                continue
            try:
                bid = parse_rational(parts[0])
            except GameError as exc:
                self.write(str(exc))
                continue
            if not (ZERO <= bid <= ctx.budget):
                self.write(f"bid must lie in [0, {format_rational(ctx.budget)}]")
                continue
            if parts[1] not in nbrs:
                self.write(f"{parts[1]} is not a neighbour of {ctx.vertex}")
                continue
            return Action(bid, parts[1])


def strategy_avg_p1(f, game: Game, strength_aware: bool = False) -> Strategy:
    return AverageP1(f, game, strength_aware)


def strategy_guard_p1(f, game: Game) -> Strategy:
    return GuardP1(f, game)


def strategy_avg_p2(f, game: Game, epsilons=None) -> Strategy:
    if epsilons is not None and not callable(epsilons):
        epsilons = geometric_schedule(epsilons)
    return AverageP2(f, game, epsilons)


def plays(game: Game, starts: Iterable[Configuration], s1: Strategy, s2: Strategy,
          max_steps: int = DEFAULT_MAX_STEPS) -> list:
    return [run_play(game, c, s1, s2, max_steps) for c in starts]
