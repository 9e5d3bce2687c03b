"""
Three ways to an exact threshold
================================

On acyclic games the threshold is computed bottom-up. With cycles the
average property has many solutions and the threshold is the largest one,
found either by enumerating regimes or through a mixed-integer program.
"""

from fractions import Fraction

from rhbg.avgprop import check_average_property
from rhbg.catalog import layered_dag, tie_family
from rhbg.milp import build_milp, export_lp, solve_milp_exhaustive
from rhbg.solver import solve_dag, solve_enumerate, solve_iterate

# A layered DAG at lambda 1/6: one backward pass.
dag = layered_dag()
print(solve_dag(dag).values)

# A self-loop at v0 means every value t for v0 is self-consistent.
game = tie_family()
for t in (Fraction(0), Fraction(1, 3), Fraction(1)):
    f = {"v0": t, "v1": Fraction(1, 2), "v2": Fraction(1), "v3": Fraction(0)}
    print(f"f(v0) = {t}: average property holds = {bool(check_average_property(f, game))}")

# Only the largest solution is the threshold; both exact oracles find it.
print("enumerate:", solve_enumerate(game).values)
model = build_milp(game)
sol = solve_milp_exhaustive(model)
print(f"milp: {sol.values}  objective {sol.objective}  binaries {len(model.binaries)}  LPs {sol.lp_solves}")

# Value iteration from above reaches the same point here in a few sweeps.
th, state = solve_iterate(game)
print("iterate:", th.values, "after", state.iteration, "sweeps")

# Larger instances can go to an external MILP solver.
print(export_lp(model)[:400])
