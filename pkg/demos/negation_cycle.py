"""Q is caused by the absence of P, and P is caused by Q.

A causal process happily fires Q, then P, and ends in {P, Q}.  But P then
blocks the cause of Q, so Q holds for no reason: the theory has no model,
and the diff between the two engines shows it.
"""
from causalog import compare_with_wf, enumerate_models, simulate
from causalog.process_sim import trace_to_text

from _corpus import load

t, exo = load("negation_cycle.foc", "empty.json")
print(trace_to_text(simulate(t, exo, seed=0)))
print(f"models: {len(enumerate_models(t, exo))}")
c = compare_with_wf(t, exo)
print(f"engines agree: {c.agree}")
for m in c.only_process:
    print(f"  reached only by the process: {m}")
