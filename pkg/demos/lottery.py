"""Residence permits: a lottery picks one extra applicant.

SELECT makes one choice, so the model set has one entry per lottery winner
plus the applicant who passed the test.
"""
from causalog import enumerate_models, print_theory

from _corpus import load

t, exo = load("lottery.foc", "lottery.json")
print(print_theory(t))
for structure in ("lottery.json", "lottery_nolottery.json"):
    t, exo = load("lottery.foc", structure)
    ms = enumerate_models(t, exo)
    print(f"{structure}: {len(ms)} model(s)")
    for m in ms:
        print("  ", sorted(str(a) for a in m.atoms(t.endogenous)))
