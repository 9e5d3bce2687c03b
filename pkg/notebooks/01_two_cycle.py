"""
Thresholds of the two-cycle game
================================

Player 1 starts at ``vleft`` and wants ``v1``. From ``vleft`` the token can
fall into the losing sink ``v2``; from ``vright`` it can reach ``v1``. Each
round both budgets are pulled towards the middle before bidding, by the
factor ``lam``.
"""

from fractions import Fraction

from rhbg.analysis import lambda_grid, max_jump, sweep, sweep_csv, tau_closed_form, two_cycle_game, two_cycle_report

# The threshold at ``vleft`` for a handful of lambdas, solved exactly.
game = two_cycle_game(0)
rows = sweep(game, "vleft", [0, Fraction(1, 8), Fraction(1, 5), Fraction(1, 4), Fraction(3, 8)], "enumerate")
for r in rows:
    closed, strength = tau_closed_form(r.lam)
    print(f"lambda={r.lam!s:5}  threshold={r.threshold!s:6}  closed form={closed!s:6}  {strength}")

# One left-right round acts linearly on the budget vector while the play
# oscillates. Its second eigenvalue decides whether the redistribution
# helps or hurts Player 1 in the long run.
for lam in (0, Fraction(1, 8), Fraction(1, 4), Fraction(3, 8)):
    print("\n".join(two_cycle_report(lam).lines()))
    print()

# Value iteration over a fine grid. Below 1/4 the threshold creeps up
# towards 3/4; at 1/4 it jumps straight to 1.
grid = lambda_grid(200, Fraction(1, 5), Fraction(3, 10))
table = sweep(game, "vleft", grid, "iterate")
jump, lo, hi = max_jump(table)
print(f"largest jump {float(jump):.4f} between lambda {lo} and {hi}")

# The CSV is ready for any plotting tool.
print("\n".join(sweep_csv(table).splitlines()[:4]))
