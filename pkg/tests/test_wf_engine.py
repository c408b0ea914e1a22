import pytest

from causalog.fo_eval import eval2
from causalog.grounder import ChoicePoint, Grounder, flatten
from causalog.parser import parse_theory
from causalog.structures import (
    Created, DomainAtom, canonical_key, default_extension, load_structure,
)
from causalog.syntax import Theory
from causalog.wf_engine import (
    Budget, ChoiceSpaceOverflow, CreationBudgetExceeded, check_model,
    enumerate_models, select_validity, unsupported_atoms, wfs,
)

from conftest import load
from gen import dumps, ground_program, random_deterministic, rng_for
from wf_oracle import well_founded

A = DomainAtom


def endo_sets(t, ms):
    return sorted(sorted(str(a) for a in m.atoms(t.endogenous)) for m in ms)


def gear_wfs(structure):
    t, exo = load("gear.foc", structure)
    g = Grounder.for_theory(t, exo)
    return wfs(flatten(g.tree(), g), {}, exo, t.endogenous)


def test_wfs_gear():
    p = gear_wfs("gear_pedal.json")
    assert p.total and p.true == {A("Turn", ("BigGear",)), A("Turn", ("SmallGear",))}
    p = gear_wfs("gear_nopedal.json")
    assert p.total and p.true == frozenset()


def test_wfs_negation_cycle_is_partial():
    t, exo = load("negation_cycle.foc", "empty.json")
    g = Grounder.for_theory(t, exo)
    p = wfs(flatten(g.tree(), g), {}, exo, t.endogenous)
    assert not p.total and p.unknown == {A("P", ()), A("Q", ())}


def test_wfs_filters_by_commitments():
    t, exo = load("or_gear.foc", "gear_pedal.json")
    g = Grounder.for_theory(t, exo)
    rules = flatten(g.tree(), g)
    cp = ChoicePoint("or", "1.0", ())
    assert A("ChainBreaks", ()) in wfs(rules, {cp: "right"}, exo, t.endogenous).true
    assert A("ChainBreaks", ()) not in wfs(rules, {cp: "left"}, exo, t.endogenous).true


def test_lottery_models():
    t, exo = load("lottery.foc", "lottery.json")
    assert endo_sets(t, enumerate_models(t, exo)) == [
        ["PermRes(a)"], ["PermRes(a)", "PermRes(b)"], ["PermRes(a)", "PermRes(c)"]]
    t, exo = load("lottery.foc", "lottery_nolottery.json")
    assert endo_sets(t, enumerate_models(t, exo)) == [["PermRes(a)"]]


def test_mail_models_shape():
    t, exo = load("mail.foc", "mail.json")
    ms = enumerate_models(t, exo)
    assert len(ms) == 8
    seen = set()
    for m in ms:
        (p,) = m.created
        (d,) = [args[1] for args in m.relations["Received"]]
        seen.add(d)
        assert m.relations["Pack"] == {(p,)} and m.relations["Cont"] == {(p, "MyMail")}
        assert {tt for _, tt in m.relations["OnCh"]} == set(range(1, d + 1))
    assert seen == set(range(1, 9))


def test_empty_theory_has_one_model():
    t, exo = load("empty.foc", "empty.json")
    ms = enumerate_models(t, exo)
    assert len(ms) == 1 and ms.models[0] == default_extension(exo, t.vocabulary)


def test_double_select_independent():
    t, exo = load("double_select.foc", "ab.json")
    assert endo_sets(t, enumerate_models(t, exo)) == [["Q(a)"], ["Q(a)", "Q(b)"], ["Q(b)"]]


def test_negation_cycle_has_no_model():
    t, exo = load("negation_cycle.foc", "empty.json")
    assert len(enumerate_models(t, exo)) == 0


def test_select_validity_examples():
    t, exo = load("lottery.foc", "lottery.json")
    cp = ChoicePoint("select", "1.0", ())
    base = default_extension(exo, t.vocabulary)
    m_b = base.with_atoms([A("PermRes", ("a",)), A("PermRes", ("b",))])
    assert select_validity(t, {cp: ("b",)}, m_b)
    m_none = base.with_atoms([A("PermRes", ("a",))])
    assert not select_validity(t, {cp: None}, m_none)
    f = parse_theory("vocab { pred Q/1; } theory { SELECT x WHERE false: Q(x). }")
    s = default_extension(load_structure('{"domain": ["a"]}', f.vocabulary, f.endogenous),
                          f.vocabulary)
    assert select_validity(f, {ChoicePoint("select", "0", ()): None}, s)
    assert len(enumerate_models(f, s.drop(f.endogenous))) == 1


def test_check_model_examples():
    t, m = load("gear.foc", "gear_final.json", model=True)
    assert check_model(t, m)
    t, m = load("gear.foc", "gear_missing.json", model=True)
    res = check_model(t, m)
    assert not res and "unsatisfied effect: Turn(SmallGear) is caused but false" in res.diagnostics


def test_check_model_rejects_unsupported_onch():
    t, exo = load("mail.foc", "mail.json")
    (good,) = [m for m in enumerate_models(t, exo) if len(m.relations["OnCh"]) == 3]
    assert check_model(t, good)
    p = good.created[0]
    bad = good.with_atoms([A("OnCh", (p, 6))])
    res = check_model(t, bad)
    assert not res
    assert "unsupported atom: OnCh(_p1,6) is true but nothing causes it" in res.diagnostics


def test_check_model_names_violated_sentence():
    t, m = load("lottery_not_b.foc", "lottery_ab_model.json", model=True)
    res = check_model(t, m)
    assert not res and res.diagnostics == ["violated sentence: ~PermRes(b)"]


CORPUS_RUNS = [
    ("gear.foc", "gear_pedal.json"), ("gear.foc", "gear_nopedal.json"),
    ("or_gear.foc", "gear_pedal.json"), ("lottery.foc", "lottery.json"),
    ("lottery.foc", "lottery_nolottery.json"), ("lottery_not_b.foc", "lottery.json"),
    ("mail.foc", "mail.json"), ("mail.foc", "mail_short.json"),
    ("mail.foc", "mail_resend.json"), ("mail_two.foc", "mail_two.json"),
    ("double_select.foc", "ab.json"), ("negation_cycle.foc", "empty.json"),
    ("empty.foc", "empty.json"), ("two_new.foc", "empty.json"),
    ("validation.foc", "validation.json"), ("president.foc", "president.json"),
    ("foal.foc", "foal.json"),
]


@pytest.mark.parametrize("theory, structure", CORPUS_RUNS)
def test_supportedness_on_corpus(theory, structure):
    t, exo = load(theory, structure)
    ms = enumerate_models(t, exo)
    for m, ca in zip(ms.models, ms.assignments):
        assert unsupported_atoms(t, m, ca) == set()
        assert select_validity(t, ca, m)
        assert all(eval2(s, m) for s in t.sentences)


@pytest.mark.parametrize("theory, structure", CORPUS_RUNS)
def test_fo_filtering_on_corpus(theory, structure):
    t, exo = load(theory, structure)
    with_s = enumerate_models(t, exo).keys()
    bare = enumerate_models(t.without_sentences(), exo)
    assert with_s == {canonical_key(m) for m in bare if all(eval2(s, m) for s in t.sentences)}


def test_fo_filtering_is_not_trivial_on_resend():
    two = load("mail_two.foc").sentences[0]
    t, exo = load("mail.foc", "mail_resend.json")
    t2 = Theory(t.vocabulary, t.cees, (two,))
    bare = enumerate_models(t, exo)
    kept = [m for m in bare if eval2(two, m)]
    assert 0 < len(kept) < len(bare)
    assert enumerate_models(t2, exo).keys() == {canonical_key(m) for m in kept}


@pytest.mark.parametrize("theory, structure", CORPUS_RUNS)
def test_deterministic_output(theory, structure):
    t, exo = load(theory, structure)
    a, b = enumerate_models(t, exo), enumerate_models(t, exo)
    assert a.to_json(t.vocabulary) == b.to_json(t.vocabulary)


def test_jobs_do_not_change_output():
    for theory, structure in [("lottery.foc", "lottery.json"), ("mail.foc", "mail.json"),
                              ("double_select.foc", "ab.json"), ("foal.foc", "foal.json")]:
        t, exo = load(theory, structure)
        one = enumerate_models(t, exo).to_json(t.vocabulary)
        assert enumerate_models(t, exo, jobs=3).to_json(t.vocabulary) == one


def test_creation_budget_is_reported_with_partial_results():
    t, exo = load("mail.foc", "mail.json")
    with pytest.raises(CreationBudgetExceeded) as exc:
        enumerate_models(t, exo, Budget(max_new=0))
    assert exc.value.partial is not None and exc.value.partial.budget_hit
    assert "new@0.0" in str(exc.value)


def test_choice_space_cap():
    t, exo = load("double_select.foc", "ab.json")
    with pytest.raises(ChoiceSpaceOverflow):
        enumerate_models(t, exo, Budget(max_choice_points=1))
    with pytest.raises(ChoiceSpaceOverflow):
        enumerate_models(t, exo, Budget(max_assignments=2))


def test_created_elements_are_fresh():
    t, exo = load("two_new.foc", "empty.json")
    (m,) = enumerate_models(t, exo).models
    assert len(m.created) == 2 and all(isinstance(c, Created) for c in m.created)


def _oracle_atoms(true):
    return {p if not a else f"{p}({','.join(a)})" for p, a in true}


@pytest.mark.parametrize("block", range(3))
def test_deterministic_theories_match_wf_oracle(block):
    for i in range(block * 100, block * 100 + 100):
        text, exo, rules = random_deterministic(rng_for(i, "wf-oracle"))
        t = parse_theory(text)
        ms = enumerate_models(t, load_structure(dumps(exo), t.vocabulary, t.endogenous))
        program, atoms = ground_program(rules, exo)
        true, false = well_founded(program, atoms)
        expected = [_oracle_atoms(true)] if true | false == atoms else []
        assert [{str(a) for a in m.atoms(t.endogenous)} for m in ms] == expected, text
