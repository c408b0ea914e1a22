"""Bicycle gears: the deterministic case.

The theory has one model per pedal setting, and the causal process that
starts from the all-false state reaches it in two steps.
"""
from causalog import enumerate_models, simulate
from causalog.process_sim import trace_to_text

from _corpus import load

for structure in ("gear_pedal.json", "gear_nopedal.json"):
    t, exo = load("gear.foc", structure)
    (m,) = enumerate_models(t, exo)
    print(f"{structure}: model {m}")
    print(trace_to_text(simulate(t, exo, seed=0)))
