import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from causalog.parser import parse_theory
from causalog.structures import (
    Created, DomainAtom, PartialStructure, Structure, StructureError,
    canonical_key, default_extension, equal_modulo_created, load_structure,
    structure_to_json,
)

from conftest import load

MAIL_VOCAB = parse_theory("vocab { pred Mail/1; pred HitSend/2; pred OnCh/2; int 0..8; }").vocabulary
LOT = load("lottery.foc")


def test_load_mail_input():
    s = load_structure('{"domain":["MyMail"], "int":[0,8], "HitSend":[["MyMail",0]]}',
                       MAIL_VOCAB, {"OnCh"})
    assert s.relations["HitSend"] == {("MyMail", 0)}
    assert "OnCh" not in s.relations
    assert s.domain == {"MyMail"} | set(range(9))


def test_load_lottery_defaults():
    s = load_structure('{"domain":[], "Lottery": true}', LOT.vocabulary, LOT.endogenous)
    assert s.holds("Lottery") and s.relations["Applied"] == frozenset()


@pytest.mark.parametrize("text, fragment", [
    ('{"domain": [], "Nope": []}', "unknown symbol"),
    ('{"domain": ["a"], "PermRes": [["a"]]}', "endogenous"),
    ('{"domain": ["a"], "Applied": [["b"]]}', "outside"),
    ('{"domain": ["a"], "Applied": [["a", "a"]]}', "arity"),
    ('{"domain": ["a"], "Lottery": [[]], "Applied": true}', "arity"),
    ('{"domain": ["a"], "created": ["_p1"]}', "only allowed"),
    ('[1, 2]', "JSON object"),
])
def test_load_errors(text, fragment):
    with pytest.raises(StructureError) as exc:
        load_structure(text, LOT.vocabulary, LOT.endogenous)
    assert fragment in str(exc.value)


def test_default_extension():
    t, exo = load("gear.foc", "gear_pedal.json")
    s = default_extension(exo, t.vocabulary)
    assert s.atoms() == {DomainAtom("Pedal", ())}
    assert default_extension(s, t.vocabulary) == s
    t, exo = load("gear.foc", "gear_nopedal.json")
    assert default_extension(exo, t.vocabulary).atoms() == frozenset()
    no_endo = parse_theory("vocab { pred A/1; }")
    s = load_structure('{"domain":["x"], "A":[["x"]]}', no_endo.vocabulary)
    assert default_extension(s, no_endo.vocabulary) == s


def test_model_file_round_trip():
    t = load("mail.foc")
    text = ('{"domain":["MyMail"],"int":[0,8],"created":["_p1"],"Mail":[["MyMail"]],'
            '"HitSend":[["MyMail",0]],"Pack":[["_p1"]],"Cont":[["_p1","MyMail"]],'
            '"OnCh":[["_p1",1]],"Received":[["_p1",1]]}')
    m = load_structure(text, t.vocabulary, t.endogenous, model=True)
    assert m.created == [Created(1)]
    back = load_structure(json.dumps(structure_to_json(m, t.vocabulary)),
                          t.vocabulary, t.endogenous, model=True)
    assert back == m


def test_partial_structure_projection():
    t, exo = load("gear.foc", "gear_pedal.json")
    s = default_extension(exo, t.vocabulary).with_atoms([DomainAtom("Turn", ("BigGear",))])
    p = PartialStructure.from_structure(s, t.endogenous)
    assert p.total and p.to_structure() == s
    assert p.value("Turn", ("BigGear",)) is True and p.value("Turn", ("SmallGear",)) is False
    q = PartialStructure(p.base, p.endogenous, frozenset(), frozenset(p.true))
    assert q.leq(p) and not p.leq(q)
    assert p.meet(q) == q and q.meet(q) == q


def _mail_model(d, created):
    rels = {"Pack": {(created,)}, "OnCh": {(created, t) for t in range(1, d + 1)},
            "Received": {(created, d)}}
    return Structure(frozenset({created, "MyMail"}),
                     {k: frozenset(v) for k, v in rels.items()}, {}, None)


def test_equal_modulo_created_examples():
    m = _mail_model(3, Created(1, "0.0"))
    assert equal_modulo_created(m, m)
    assert equal_modulo_created(m, _mail_model(3, Created(2, "0.0")))
    assert not equal_modulo_created(m, _mail_model(5, Created(1, "0.0")))


def test_aux_predicates_are_ignored():
    a = _mail_model(2, Created(1))
    b = Structure(a.domain, {**a.relations, "N1": frozenset({(Created(1),)})})
    assert not equal_modulo_created(a, b)
    assert equal_modulo_created(a, b, aux={"N1"})


# exhaustive reference: try every bijection between the created elements

def brute_equal(m1, m2):
    c1, c2 = m1.created, m2.created
    if len(c1) != len(c2) or set(m1.relations) != set(m2.relations):
        return False
    if m1.domain - set(c1) != m2.domain - set(c2):
        return False
    for perm in itertools.permutations(c2):
        f = dict(zip(c1, perm))
        if all({tuple(f.get(e, e) for e in t) for t in m1.relations[p]} == set(m2.relations[p])
               for p in m1.relations):
            return True
    return False


@st.composite
def small_structures(draw):
    k = draw(st.integers(0, 4))
    created = [Created(i + 1, "t") for i in range(k)]
    elems = ["a"] + created
    p = draw(st.sets(st.sampled_from(elems)))
    pairs = [(x, y) for x in elems for y in elems]
    r = draw(st.sets(st.sampled_from(pairs), max_size=6))
    return Structure(frozenset(elems), {"P": frozenset((x,) for x in p), "R": frozenset(r)})


@st.composite
def structure_pairs(draw):
    m1 = draw(small_structures())
    if draw(st.booleans()):
        perm = draw(st.permutations(m1.created))
        f = {c: Created(100 + i) for c, i in zip(m1.created, [x.index for x in perm])}
        rels = {p: frozenset(tuple(f.get(e, e) for e in t) for t in ts)
                for p, ts in m1.relations.items()}
        m2 = Structure(frozenset(f.get(e, e) for e in m1.domain), rels)
    else:
        m2 = draw(small_structures())
    return m1, m2


@settings(max_examples=300, deadline=None)
@given(structure_pairs())
def test_equal_modulo_created_matches_bijection_search(pair):
    m1, m2 = pair
    assert equal_modulo_created(m1, m2) == brute_equal(m1, m2)


@settings(max_examples=100, deadline=None)
@given(small_structures(), small_structures(), small_structures())
def test_equal_modulo_created_is_an_equivalence(a, b, c):
    assert equal_modulo_created(a, a)
    assert equal_modulo_created(a, b) == equal_modulo_created(b, a)
    if equal_modulo_created(a, b) and equal_modulo_created(b, c):
        assert equal_modulo_created(a, c)
    assert (canonical_key(a) == canonical_key(b)) == equal_modulo_created(a, b)
