"""Walk through the three-object topology program.

An active C on L1 owns one D on each of L1, L2 and L3. The checker infers
a behaviour for `main`, filters out the local write, and the machine then
shows how the remaining writes look under different placements.
"""
from lnuma import corpus
from lnuma.runtime import run
from lnuma.syntax import parse_program, pretty
from lnuma.typer import check_program

program = parse_program(corpus.source("topology"))

reports = []
errors = check_program(program, reports)
assert not errors, errors
for r in reports:
    print(f"{r.cls}.{r.method}")
    print(f"  inferred  {pretty(r.inferred)}")
    print(f"  filtered  {pretty(r.filtered)}")

print()
for placement in ({"L1": 0, "L2": 1, "L3": 1},
                  {"L1": 0, "L2": 1, "L3": 2},
                  {"L1": 0, "L2": 0, "L3": 0}):
    result = run(program, placement)
    remote = [pretty(label) for label in result.labels] or ["(nothing remote)"]
    print(f"{placement}: {' '.join(remote)}")
