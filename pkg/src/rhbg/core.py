"""Domain types for Robin Hood reachability bidding games.

All numeric quantities (budgets, bids, the redistribution factor and
thresholds) are :class:`fractions.Fraction` values; nothing in the exact
modules ever touches binary floating point.
"""
from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


class GameError(ValueError):
    """Invalid game description or query (a user-side error)."""


class CandidateError(GameError):
    """A candidate value map is incomplete or out of range.

    ``violations`` lists ``(vertex, message)`` pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v}: {msg}" for v, msg in self.violations)
        super().__init__(f"invalid candidate: {lines}")


def parse_rational(value) -> Fraction:
    """Parse an exact rational from an int or a string such as ``"p/q"`` or ``"0.6"``.

    Floats are rejected: they cannot be told apart from their rounding error.
    """
    if isinstance(value, bool):
        raise GameError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise GameError(f"binary float {value!r} rejected; write it as a string such as \"p/q\"")
    if not isinstance(value, str):
        raise GameError(f"not a rational: {value!r}")
    text = value.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise GameError(f"not a rational: {value!r}") from None


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 17) -> str:
    """Render ``q`` as a decimal with ``digits`` significant digits (``%.17g`` style)."""
    if q == 0:
        return "0"
    from decimal import Context, Decimal

    ctx = Context(prec=digits)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    text = format(d.normalize(ctx), "f")
    return text


def simplest_within(q: Fraction, tol: Fraction) -> Fraction:
    """Rational with the smallest power-of-ten denominator bound lying within ``tol`` of ``q``."""
    d = 1
    while d <= 10**12:
        r = q.limit_denominator(d)
        if abs(r - q) <= tol:
            return r
        d *= 10
    return q


class Method(str, enum.Enum):
    DAG = "dag"
    ITERATE = "iterate"
    ENUMERATE = "enumerate"
    MILP = "milp"


class Strength(str, enum.Enum):
    ONE_STRONG = "OneStrong"
    TWO_STRONG = "TwoStrong"
    WEAK = "Weak"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Game:
    """Finite game graph with a target set and redistribution factor ``lam``.

    The vertex order given at construction is the canonical order used for
    every tie-break downstream. Outgoing edges of target vertices are dropped
    (with a warning) so that targets are sinks.
    """

    vertices: tuple
    edges: tuple
    targets: frozenset
    lam: Fraction

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if len(set(vertices)) != len(vertices):
            seen, dups = set(), []
            for v in vertices:
                if v in seen:
                    dups.append(v)
                seen.add(v)
            raise GameError(f"duplicate vertex id(s): {', '.join(map(str, dups))}")
        for v in vertices:
            if not isinstance(v, str) or not v:
                raise GameError(f"vertex ids must be non-empty strings, got {v!r}")
        index = {v: i for i, v in enumerate(vertices)}
        targets = frozenset(self.targets)
        unknown = sorted(t for t in targets if t not in index)
        if unknown:
            raise GameError(f"unknown target vertex: {', '.join(unknown)}")
        lam = parse_rational(self.lam)
        if not (ZERO <= lam < HALF):
            raise GameError(f"lambda out of range: {format_rational(lam)} not in [0, 1/2)")

        edges = set()
        dropped = []
        for e in self.edges:
            try:
                u, w = e
            except (TypeError, ValueError):
                raise GameError(f"malformed edge: {e!r}") from None
            for x in (u, w):
                if x not in index:
                    raise GameError(f"unknown vertex in edge ({u}, {w}): {x}")
            if u in targets:
                dropped.append((u, w))
                continue
            edges.add((u, w))
        if dropped:
            warnings.warn(
                f"dropping {len(dropped)} outgoing edge(s) of target vertices so targets are sinks",
                stacklevel=3,
            )
        ordered = tuple(sorted(edges, key=lambda e: (index[e[0]], index[e[1]])))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", ordered)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "lam", lam)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def successors(self) -> dict:
        out = {v: [] for v in self.vertices}
        for u, w in self.edges:
            out[u].append(w)
        return {v: tuple(ws) for v, ws in out.items()}

    def neighbors(self, v: str) -> tuple:
        return self.successors[v]

    def is_sink(self, v: str) -> bool:
        return not self.successors[v]

    @property
    def sinks(self) -> tuple:
        return tuple(v for v in self.vertices if self.is_sink(v))

    @property
    def non_sinks(self) -> tuple:
        return tuple(v for v in self.vertices if not self.is_sink(v))

    def sink_value(self, v: str) -> Fraction:
        return ZERO if v in self.targets else ONE

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def topological_order(self):
        """Vertices ordered sinks-first (every vertex after its successors), or None on a cycle."""
        state = {v: 0 for v in self.vertices}
        order = []
        for root in self.vertices:
            if state[root]:
                continue
            stack = [(root, iter(self.successors[root]))]
            state[root] = 1
            while stack:
                v, it = stack[-1]
                for w in it:
                    if state[w] == 1:
                        return None
                    if state[w] == 0:
                        state[w] = 1
                        stack.append((w, iter(self.successors[w])))
                        break
                else:
                    state[v] = 2
                    order.append(v)
                    stack.pop()
        return order

    def reachable_from(self, v: str) -> set:
        seen = {v}
        todo = [v]
        while todo:
            u = todo.pop()
            for w in self.successors[u]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    def with_lambda(self, lam) -> "Game":
        return Game(self.vertices, self.edges, self.targets, parse_rational(lam))

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "targets": [v for v in self.vertices if v in self.targets],
            "lambda": format_rational(self.lam),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def game_from_dict(data: Mapping) -> Game:
    if not isinstance(data, Mapping):
        raise GameError("game description must be an object")
    missing = [k for k in ("vertices", "edges", "targets", "lambda") if k not in data]
    if missing:
        raise GameError(f"missing field(s): {', '.join(missing)}")
    vertices, edges, targets = data["vertices"], data["edges"], data["targets"]
    for name, val in (("vertices", vertices), ("edges", edges), ("targets", targets)):
        if not isinstance(val, list):
            raise GameError(f"field {name!r} must be a list")
    return Game(tuple(vertices), tuple(tuple(e) if isinstance(e, list) else e for e in edges),
                frozenset(targets), parse_rational(data["lambda"]))


def parse_game(text: str) -> Game:
    """Parse and normalize a game file (JSON object with vertices/edges/targets/lambda)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed game file: {exc}") from None
    return game_from_dict(data)


def normalize_game(game: Game) -> Game:
    """Return the sink-normalized form of ``game`` (construction already normalizes)."""
    return Game(game.vertices, game.edges, game.targets, game.lam)


@dataclass(frozen=True)
class Configuration:
    vertex: str
    budget1: Fraction

    def __post_init__(self):
        b = parse_rational(self.budget1)
        if not (ZERO <= b <= ONE):
            raise GameError(f"budget {format_rational(b)} not in [0, 1]")
        object.__setattr__(self, "budget1", b)

    @property
    def budget2(self) -> Fraction:
        return ONE - self.budget1


@dataclass
class ThresholdMap:
    """Per-vertex threshold values plus how they were obtained.

    ``residual`` is 0 for the exact methods and the last sup-norm change for
    value iteration.
    """

    values: dict
    method: Method
    residual: Fraction = ZERO
    iterations: int = 0
    extra: dict = field(default_factory=dict)

    def __getitem__(self, v):
        return self.values[v]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def items(self):
        return self.values.items()

    @property
    def exact(self) -> bool:
        return self.method is not Method.ITERATE or self.residual == 0


def validate_candidate(values: Mapping, game: Game) -> dict:
    """Check a user-supplied value map covers ``game`` with values in [0, 1].

    Returns a fresh ``{vertex: Fraction}`` dict in canonical order or raises
    :class:`CandidateError` listing every problem found.
    """
    violations = []
    out = {}
    for v in game.vertices:
        if v not in values:
            violations.append((v, "missing value"))
            continue
        try:
            q = parse_rational(values[v])
        except GameError as exc:
            violations.append((v, str(exc)))
            continue
        if not (ZERO <= q <= ONE):
            violations.append((v, f"value {format_rational(q)} outside [0, 1]"))
        out[v] = q
    extra = sorted(set(values) - set(game.vertices))
    for v in extra:
        violations.append((v, "not a vertex of the game"))
    if violations:
        raise CandidateError(violations)
    return out


def parse_candidate(text: str, game: Game) -> dict:
    """Parse a candidate-value file ``{"values": {...}}`` and validate it."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"malformed candidate file: {exc}") from None
    if not isinstance(data, Mapping) or not isinstance(data.get("values"), Mapping):
        raise GameError("candidate file must be an object with a 'values' object")
    return validate_candidate(data["values"], game)


def make_game(vertices: Iterable[str], edges: Iterable, targets: Iterable[str], lam) -> Game:
    """Convenience constructor accepting any iterables and a rational-like ``lam``."""
    return Game(tuple(vertices), tuple(tuple(e) for e in edges), frozenset(targets), parse_rational(lam))
