"""Compare placements of the fan-out program by static cost.

Three nodes sit on a line, so 0 and 2 are twice as far apart as
neighbours. Every way of putting the program's locations on those nodes
is priced from the declared behaviour alone, then the cheapest one is run
to confirm the static figure against the measured trace.
"""
from itertools import product

import numpy as np

from lnuma import corpus
from lnuma.cost import CostMatrix, static_cost, trace_cost
from lnuma.runtime import RandomScheduler, run
from lnuma.syntax import parse_program

line = CostMatrix(np.array([[0, 5, 10], [5, 0, 5], [10, 5, 0]]))
program = parse_program(corpus.source("fanout"))
names = [str(l) for l in program.get("Main").param_locations()]
declared = program.get("Main").method("main").behaviour

ranked = []
for nodes in product(range(3), repeat=len(names)):
    mapping = dict(zip(names, nodes))
    report = static_cost(declared, mapping, line)
    ranked.append((report.total, report.makespan_bound, nodes, mapping))
ranked.sort(key=lambda row: row[:3])

print("total  makespan  placement")
for total, span, _, mapping in ranked[:5]:
    print(f"{total:5}  {span:8}  {mapping}")
print("  ...")
for total, span, _, mapping in ranked[-3:]:
    print(f"{total:5}  {span:8}  {mapping}")

# A single node costs nothing, so pick the best placement that spreads
# the program over at least two nodes and check it against real runs.
total, _, nodes, mapping = next(row for row in ranked if len(set(row[2])) > 1)
measured = {trace_cost(run(program, mapping, RandomScheduler(seed)).trace, line).total
            for seed in range(20)}
print()
print(f"best spread placement {mapping}: static {total}, measured {sorted(measured)}")
