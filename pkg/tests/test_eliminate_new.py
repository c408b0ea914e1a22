"""Models of a theory and of its NEW-free translation coincide once spare
elements are turned back into created ones and auxiliaries are dropped."""
import pytest

from causalog.grounder import add_reservoir, auxiliary_predicates, eliminate_new, restore_created
from causalog.structures import canonical_key
from causalog.wf_engine import enumerate_models

from conftest import load

NEW_THEORIES = [
    ("two_new.foc", "empty.json"),
    ("mail.foc", "mail.json"),
    ("mail.foc", "mail_short.json"),
    ("mail.foc", "mail_resend.json"),
    ("mail_two.foc", "mail_two.json"),
    ("validation.foc", "validation.json"),
    ("president.foc", "president.json"),
    ("foal.foc", "foal.json"),
]


def translated_keys(t, exo, spares):
    e = eliminate_new(t)
    aux = auxiliary_predicates(t, e)
    ms = enumerate_models(e, add_reservoir(exo, spares))
    return {canonical_key(restore_created(m), aux) for m in ms}


@pytest.mark.parametrize("theory, structure", NEW_THEORIES)
def test_translation_preserves_models(theory, structure):
    t, exo = load(theory, structure)
    ms = enumerate_models(t, exo)
    needed = max((len(m.created) for m in ms), default=0)
    assert needed >= 1
    assert translated_keys(t, exo, needed) == ms.keys()


@pytest.mark.parametrize("theory, structure", [("two_new.foc", "empty.json"),
                                               ("validation.foc", "validation.json"),
                                               ("foal.foc", "foal.json"),
                                               ("mail.foc", "mail_short.json")])
def test_unused_spares_are_invisible(theory, structure):
    t, exo = load(theory, structure)
    ms = enumerate_models(t, exo)
    needed = max(len(m.created) for m in ms)
    assert translated_keys(t, exo, needed + 1) == ms.keys()


def test_too_few_spares_loses_models():
    t, exo = load("two_new.foc", "empty.json")
    assert translated_keys(t, exo, 1) == set()
