"""Object creation can be replaced by selection over spare elements.

The translated theory picks packages from a reserve, marks them as used and
adds axioms that keep each pick unique.  With as many spares as creations,
the two theories have the same models once the spares are renamed back.
"""
from causalog import (
    add_reservoir, eliminate_new, enumerate_models, print_theory, restore_created,
)
from causalog.grounder import auxiliary_predicates
from causalog.structures import canonical_key

from _corpus import load

t, exo = load("two_new.foc", "empty.json")
e = eliminate_new(t)
print(print_theory(e))

aux = auxiliary_predicates(t, e)
original = enumerate_models(t, exo).keys()
for spares in (1, 2, 3):
    models = enumerate_models(e, add_reservoir(exo, spares))
    translated = {canonical_key(restore_created(m), aux) for m in models}
    print(f"{spares} spare(s): same models as the original: {translated == original}")
