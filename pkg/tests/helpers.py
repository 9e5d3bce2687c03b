"""Game generators and independent oracles shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from rhbg.core import Game, make_game


def random_lambda(rng: random.Random, max_den: int = 12) -> Fraction:
    q = rng.randint(1, max_den)
    p = rng.randrange(0, (q + 1) // 2) if q > 1 else 0
    lam = Fraction(p, q)
    return lam if lam < Fraction(1, 2) else Fraction(0)


def random_game(rng: random.Random, n: int | None = None, max_out: int = 3) -> Game:
    """``u0`` is the target, ``u1`` a losing sink, the rest have 1..max_out successors (self-loops allowed)."""
    n = n or rng.randint(2, 6)
    names = [f"u{i}" for i in range(n)]
    edges = []
    for v in names[2:]:
        for w in rng.sample(names, rng.randint(1, min(max_out, n))):
            edges.append((v, w))
    return make_game(names, edges, ["u0"], random_lambda(rng))


def random_dag(rng: random.Random, n: int | None = None, max_out: int = 3) -> Game:
    """Edges only go to lower-numbered vertices."""
    n = n or rng.randint(2, 8)
    names = [f"u{i}" for i in range(n)]
    edges = []
    for i in range(2, n):
        for j in rng.sample(range(i), rng.randint(1, min(max_out, i))):
            edges.append((names[i], names[j]))
    return make_game(names, edges, ["u0"], random_lambda(rng))


def depth(game: Game) -> int:
    """Length of the longest path (edges) in an acyclic game."""
    d = {}
    for v in game.topological_order():
        d[v] = max((d[w] + 1 for w in game.neighbors(v)), default=0)
    return max(d.values(), default=0)


def unravel(game: Game, n: int) -> Game:
    """Depth-``n`` unravelling: copies ``(v, k)`` for ``k <= n`` with edges one layer down.

    Last-layer copies of non-targets are losing sinks, target copies are targets.
    """
    name = lambda v, k: f"{v}@{k}"
    vertices = [name(v, k) for k in range(n + 1) for v in game.vertices]
    edges = [(name(u, k), name(w, k + 1)) for k in range(n) for u, w in game.edges]
    targets = [name(t, k) for k in range(n + 1) for t in game.targets]
    return make_game(vertices, edges, targets, game.lam)


@st.composite
def games(draw, max_vertices: int = 5, max_out: int = 3, acyclic: bool = False):
    n = draw(st.integers(2, max_vertices))
    names = [f"u{i}" for i in range(n)]
    edges = []
    for i in range(2, n):
        pool = list(range(i)) if acyclic else list(range(n))
        k = draw(st.integers(1, min(max_out, len(pool))))
        for j in draw(st.lists(st.sampled_from(pool), min_size=k, max_size=k, unique=True)):
            edges.append((names[i], names[j]))
    q = draw(st.integers(1, 12))
    p = draw(st.integers(0, (q - 1) // 2))
    return make_game(names, edges, ["u0"], Fraction(p, q))


rationals01 = st.fractions(min_value=0, max_value=1, max_denominator=50)
lambdas = st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=60).filter(lambda x: x < Fraction(1, 2))
