"""The soundness monitor, before and after breaking the interpreter.

Every step of every interleaving of `ping` is checked against the global
behaviour. Then the remote allocation rule is patched to report a read
instead of a write, and the monitor pins down the first step that no
longer matches.
"""
import lnuma.runtime.machine as machine
from lnuma import corpus
from lnuma.monitor import explore_verified, verify_run
from lnuma.syntax import parse_program, pretty

ping = parse_program(corpus.source("ping"))
checked = explore_verified(ping, {"L1": 0, "L2": 1})
print(f"ping: {len(checked.result.traces)} interleavings, "
      f"{checked.result.steps} steps, ok={checked.ok}")
for trace in sorted(checked.result.traces, key=str):
    print("  " + " ".join(pretty(label) for label in trace))

print()
topology = parse_program(corpus.source("topology"))
honest = machine._new_label
machine._new_label = lambda src, dst: machine.access_label("read", src, dst)
try:
    report = verify_run(topology, {"L1": 0, "L2": 1, "L3": 1}, "fifo")
finally:
    machine._new_label = honest

print(f"patched interpreter: ok={report.ok}")
print(report.first_failure.format())
