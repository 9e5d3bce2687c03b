"""
Who wins at the threshold itself
================================

Above the threshold Player 1 wins, below it Player 2 wins. Exactly at the
threshold it depends on the game: one player may still win, or neither.
"""

from rhbg.catalog import strong_example, weak_example
from rhbg.solver import solve_dag, solve_enumerate
from rhbg.strength import build_g_good, classify_detailed, partition_vertices

# A DAG where Player 1 wins from ``a`` with exactly 7/18 of the money.
g = strong_example()
th = solve_dag(g)
for v, s in classify_detailed(g, th).strengths.items():
    print(v, th[v], s)

# Put a self-looping entry in front of it. At ``v0`` Player 2 can keep the
# token circling forever, so the threshold 5/18 is won by neither player.
g = weak_example()
th = solve_enumerate(g)
detail = classify_detailed(g, th)
print()
print("partition:", {v: detail.partition.part_of(v) for v in g.vertices})
print("good subgraph:", build_g_good(g, th, partition_vertices(g, th)))
for v in g.vertices:
    print(v, th[v], detail[v])
