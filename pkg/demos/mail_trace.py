"""A mail package travels the channel until it is received.

Sending creates a package with NEW, and SELECT picks its delay.  Each model
corresponds to one delay; a seeded process shows the package moving along.
"""
import sys

from causalog import enumerate_models, simulate
from causalog.process_sim import trace_to_text

from _corpus import load

t, exo = load("mail.foc", "mail.json")
ms = enumerate_models(t, exo)
print(f"{len(ms)} models, one per delay:")
for m in ms:
    (d,) = [args[1] for args in m.relations["Received"]]
    print(f"  delay {d}: on the channel at {sorted(tt for _, tt in m.relations['OnCh'])}")

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
tr = simulate(t, exo, seed=seed)
print()
print(trace_to_text(tr))
print(f"growth steps: {tr.growth_steps}")
