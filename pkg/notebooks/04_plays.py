"""
Simulated plays
===============

Threshold strategies in action: bid half the spread of the neighbours'
thresholds, then move to the best neighbour.
"""

import random
from fractions import Fraction

from rhbg.analysis import two_cycle_game
from rhbg.core import Configuration
from rhbg.simulator import Action, Fixed, Scripted, run_play, strategy_avg_p1, strategy_avg_p2, strategy_guard_p1
from rhbg.solver import solve_enumerate

# Lambda 1/8: Player 1 needs 7/10 at ``vleft``. Starting from 0.6 is not
# enough against an opponent who outbids by a shrinking epsilon.
game = two_cycle_game("1/8")
th = solve_enumerate(game)
trace = run_play(game, Configuration("vleft", Fraction("0.6")),
                 strategy_guard_p1(th, game), strategy_avg_p2(th, game, Fraction(1, 1000)))
print(trace.to_text())

# Lambda 1/4: holding all the money, Player 1 wins on an exact budget.
quarter = two_cycle_game("1/4")
p1 = Scripted([Action(Fraction(1, 4), "vright"), Action(Fraction(1, 2), "v1")])
p2 = Scripted([Action(Fraction(1, 4), "v2"), Action(Fraction(1, 2), "vleft")])
print(run_play(quarter, Configuration("vleft", 1), p1, p2).to_text())

# Above the threshold the averaging strategy keeps Player 1's budget above
# the threshold of wherever the token is, whatever the opponent does.
rng = random.Random(7)
noise = Fixed(lambda ctx: Action(ctx.budget * Fraction(rng.randint(0, 4), 4),
                                 rng.choice(ctx.game.neighbors(ctx.vertex))))
wins = 0
for _ in range(200):
    tr = run_play(game, Configuration("vleft", Fraction(71, 100)), strategy_avg_p1(th, game), noise, 200)
    assert all(b > th[v] for v, b in tr.configurations())
    wins += tr.status.value == "P1Wins"
print(f"{wins} of 200 random plays ended at the target, none at the losing sink")
